#include "nldiff/quadrature.hpp"

#include <cstdlib>
#include <string>

namespace nldiff
{
    QuadratureOptions default_quadrature_options()
    {
        QuadratureOptions opts;
        if (const char *env = std::getenv("NLDIFF_QUAD_TOL"))
        {
            try
            {
                const double tol = std::stod(env);
                if (tol > 0.0)
                    opts.abs_tol = tol;
            }
            catch (const std::exception &)
            {
                // malformed override: keep the built-in default
            }
        }
        return opts;
    }
} // namespace nldiff
