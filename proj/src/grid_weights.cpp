#include "nldiff/grid_weights.hpp"

#include <cmath>
#include <cstdlib>
#include <vector>

#include "nldiff/errors.hpp"

namespace nldiff
{
    Grid build_grid(double L, int M)
    {
        if (!(L > 0.0))
            throw ParameterError("build_grid: requires L > 0");
        if (M < 4 || M % 2 != 0)
            throw ParameterError("build_grid: M must be an even integer >= 4");
        Grid grid;
        grid.L = L;
        grid.M = M;
        grid.h = 2.0 * L / M;
        grid.L_W = 2.0 * L;
        return grid;
    }

    namespace
    {
        void check_index(const Grid &grid, int j)
        {
            if (j == 0 || std::abs(j) > grid.M)
                throw ParameterError("hat_tail_integral: requires 1 <= |j| <= M");
        }

        // Closed forms by double integration by parts; F, F' are only sampled at x_k >= h.
        double hat_closed(const Kernel &kernel, const Grid &grid, int k, const std::vector<double> &F)
        {
            const double h = grid.h;
            if (k == 1)
                return -kernel.antiderivative_first(grid.node(1)) + (F[2] - F[1]) / h;
            if (k == grid.M)
                return kernel.antiderivative_first(grid.node(k)) + (F[k - 1] - F[k]) / h;
            return (F[k + 1] - 2.0 * F[k] + F[k - 1]) / h;
        }

        double hat_quadrature(const Kernel &kernel, const Grid &grid, int k)
        {
            const double h = grid.h;
            const double center = grid.node(k);
            const double lo = std::max(center - h, h);
            const double hi = std::min(center + h, grid.L_W);
            auto integrand = [&](double y) { return (1.0 - std::abs(y - center) / h) * kernel(y); };
            auto opts = default_quadrature_options();
            opts.abs_tol *= h;
            if (lo < center && center < hi)
            {
                const std::array<double, 3> pts{lo, center, hi};
                return adaptive_quad_panels(integrand, std::span<const double>(pts), opts).value;
            }
            return adaptive_quad(integrand, lo, hi, opts).value;
        }

        std::vector<double> antiderivative_at_nodes(const Kernel &kernel, const Grid &grid)
        {
            std::vector<double> F(static_cast<std::size_t>(grid.M) + 2, 0.0);
            for (int k = 0; k <= grid.M + 1; ++k)
                F[static_cast<std::size_t>(k)] = kernel.antiderivative_second(grid.node(k));
            return F;
        }
    } // namespace

    double hat_tail_integral(const Kernel &kernel, const Grid &grid, int j)
    {
        check_index(grid, j);
        const int k = std::abs(j);
        if (kernel.has_antiderivatives())
        {
            const auto F = antiderivative_at_nodes(kernel, grid);
            return hat_closed(kernel, grid, k, F);
        }
        return hat_quadrature(kernel, grid, k);
    }

    WeightSet compute_weights(const Kernel &kernel, const Grid &grid)
    {
        const int M = grid.M;
        WeightSet ws;
        ws.M = M;
        ws.values = Eigen::VectorXd::Zero(2 * M + 1);

        std::vector<double> F;
        const bool closed = kernel.has_antiderivatives();
        if (closed)
            F = antiderivative_at_nodes(kernel, grid);

        for (int k = 1; k <= M; ++k)
        {
            const double w = closed ? hat_closed(kernel, grid, k, F) : hat_quadrature(kernel, grid, k);
            ws.values[M + k] = w;
            ws.values[M - k] = w;
        }
        const double f1 = moment_f(kernel, grid.h, 1);
        ws.values[M + 1] += f1;
        ws.values[M - 1] += f1;

        ws.c1 = ws.values.sum();
        ws.A = tail_mass(kernel, grid.L_W);
        return ws;
    }
} // namespace nldiff
