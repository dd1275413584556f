#include "nldiff/assembly.hpp"

#include <cmath>
#include <cstdlib>
#include <vector>

#include "nldiff/errors.hpp"
#include "nldiff/special_functions.hpp"

namespace nldiff
{
    const char *to_string(ProblemKind kind)
    {
        switch (kind)
        {
        case ProblemKind::Dirichlet:
            return "dirichlet";
        case ProblemKind::RealLine:
            return "realline";
        case ProblemKind::Neumann:
            return "neumann";
        }
        return "unknown";
    }

    namespace
    {
        // Boundary integrals are tiny (order e^{-eta L_W}); hold them to relative accuracy.
        QuadratureOptions boundary_options()
        {
            QuadratureOptions opts;
            opts.abs_tol = 1e-300;
            opts.rel_tol = 1e-12;
            return opts;
        }

        // sup_{y >= 0} (s + y)^p e^{-eta y / 2}
        double polynomial_envelope(double s, double p, double eta)
        {
            if (p <= 0.0)
                return std::pow(s, p);
            const double y_star = 2.0 * p / eta - s;
            if (y_star <= 0.0)
                return std::pow(s, p);
            return std::pow(2.0 * p / eta, p) * std::exp(-0.5 * eta * y_star);
        }

        void check_weights(const Grid &grid, const WeightSet &weights)
        {
            if (weights.M != grid.M)
                throw ParameterError("assembly: weights were computed on a different grid");
        }
    } // namespace

    double dirichlet_boundary_B(const DirichletProblem &problem, const Kernel &kernel, const Grid &grid, int i)
    {
        const int half = grid.M / 2;
        if (i < -half + 1 || i > half - 1)
            throw ParameterError("dirichlet_boundary_B: requires -M/2 + 1 <= i <= M/2 - 1");
        const double x = grid.node(i);
        if (problem.closed_B)
            return problem.closed_B(x, grid.L_W);
        if (!problem.exterior)
            throw ParameterError("dirichlet_boundary_B: exterior data missing");
        if (!problem.exterior_growth)
            throw ParameterError("dirichlet_boundary_B: quadrature needs a growth certificate for the exterior data");

        const auto &growth = *problem.exterior_growth;
        const auto &d = kernel.decay();
        ExponentialDecay cert;
        if (growth.exponent <= 0.0)
        {
            cert = {d.rate, d.constant * growth.constant * std::pow(1.0 + std::abs(x), growth.exponent)};
        }
        else
        {
            const double envelope = polynomial_envelope(1.0 + std::abs(x), growth.exponent, d.rate);
            cert = {0.5 * d.rate, d.constant * growth.constant * envelope};
        }

        const auto opts = boundary_options();
        const auto &g = problem.exterior;
        auto right = [&](double y) { return g(x - y) * kernel(y); };
        auto left = [&](double y) { return g(x + y) * kernel(-y); };
        return adaptive_quad_to_infinity(right, grid.L_W, cert, opts).value +
               adaptive_quad_to_infinity(left, grid.L_W, cert, opts).value;
    }

    std::pair<double, double> realline_boundary_B12(const DecayModel &decay, const Kernel &kernel, const Grid &grid,
                                                    int i)
    {
        const int half = grid.M / 2;
        if (i < -half || i > half)
            throw ParameterError("realline_boundary_B12: requires -M/2 <= i <= M/2");
        if (!(decay.q > 0.0))
            throw ParameterError("realline_boundary_B12: decay exponent must be positive");

        const double x = grid.node(i);
        const double q = decay.q;
        const double scale = std::pow(grid.L, q);
        const double d1 = grid.L_W + x;
        const double d2 = grid.L_W - x;
        if (!(d1 > 0.0) || !(d2 > 0.0))
            throw DomainError("realline_boundary_B12: L_W +- x_i must be positive");

        const auto terms = kernel.exponential_terms();
        if (!terms.empty())
        {
            // int_{D}^inf s^{-q} a e^{-b s} ds = a D^{1-q} E_q(b D)
            double b1 = 0.0;
            double b2 = 0.0;
            for (const auto &t : terms)
            {
                const double far = std::exp(-t.rate * grid.L_W);
                b1 += t.amplitude * far * std::pow(d1, 1.0 - q) * exp_int_scaled(q, t.rate * d1);
                b2 += t.amplitude * far * std::pow(d2, 1.0 - q) * exp_int_scaled(q, t.rate * d2);
            }
            return {scale * b1, scale * b2};
        }

        // L^q |x_i -+ y|^{-q} <= 1 on the integration range, so the kernel certificate applies as is.
        const auto opts = boundary_options();
        auto right_exterior = [&](double y) { return scale * std::pow(x + y, -q) * kernel(-y); };
        auto left_exterior = [&](double y) { return scale * std::pow(y - x, -q) * kernel(y); };
        const double b1 = adaptive_quad_to_infinity(right_exterior, grid.L_W, kernel.decay(), opts).value;
        const double b2 = adaptive_quad_to_infinity(left_exterior, grid.L_W, kernel.decay(), opts).value;
        return {b1, b2};
    }

    DiscreteSystem assemble_dirichlet(const DirichletProblem &problem, const Kernel &kernel, const Grid &grid,
                                      const WeightSet &weights)
    {
        check_weights(grid, weights);
        if (!problem.f)
            throw ParameterError("assemble_dirichlet: forcing missing");
        if (!problem.exterior)
            throw ParameterError("assemble_dirichlet: exterior data missing");

        const int M = grid.M;
        const int half = M / 2;
        const int first = -half + 1;
        const int n = M - 1;

        DiscreteSystem sys;
        sys.kind = ProblemKind::Dirichlet;
        sys.grid = grid;
        sys.first_index = first;
        sys.exterior = problem.exterior;
        sys.matrix.resize(n, n);
        sys.rhs.resize(n);

        const double diag = weights.c1 + weights.A;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                sys.matrix(r, c) = (r == c ? diag : 0.0) - weights[r - c];

        // Exterior data at lattice offsets k = i - j with |k| >= M/2 (at most 3M/2).
        const int reach = 3 * half;
        std::vector<double> g(static_cast<std::size_t>(2 * reach + 1), 0.0);
        for (int k = -reach; k <= reach; ++k)
            if (std::abs(k) >= half)
                g[static_cast<std::size_t>(k + reach)] = problem.exterior(grid.node(k));
        auto g_at = [&](int k) { return g[static_cast<std::size_t>(k + reach)]; };

        for (int r = 0; r < n; ++r)
        {
            const int i = first + r;
            double c2 = 0.0;
            for (int j = -M; j <= i - half; ++j)
                c2 += g_at(i - j) * weights[j];
            double c3 = 0.0;
            for (int j = i + half; j <= M; ++j)
                c3 += g_at(i - j) * weights[j];
            sys.rhs[r] = problem.f(grid.node(i)) + c2 + c3 + dirichlet_boundary_B(problem, kernel, grid, i);
        }
        return sys;
    }

    DiscreteSystem assemble_realline(const RealLineProblem &problem, const Kernel &kernel, const Grid &grid,
                                     const WeightSet &weights)
    {
        check_weights(grid, weights);
        if (!problem.f)
            throw ParameterError("assemble_realline: forcing missing");

        const int M = grid.M;
        const int half = M / 2;
        const int first = -half;
        const int n = M + 1;
        const double scale = std::pow(grid.L, problem.decay.q);

        DiscreteSystem sys;
        sys.kind = ProblemKind::RealLine;
        sys.grid = grid;
        sys.first_index = first;
        sys.decay = problem.decay;
        sys.matrix.resize(n, n);
        sys.rhs.resize(n);

        const double diag = weights.c1 + weights.A;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                sys.matrix(r, c) = (r == c ? diag : 0.0) - weights[r - c];

        for (int r = 0; r < n; ++r)
        {
            const int i = first + r;
            // Offsets i - j beyond M/2 fall outside [-L, L]; the decay model ties them to u_{+-M/2}.
            double c2 = 0.0; // right of L
            for (int j = -M; j <= i - half - 1; ++j)
                c2 += scale * problem.decay(grid.node(i - j)) * weights[j];
            double c3 = 0.0; // left of -L
            for (int j = i + half + 1; j <= M; ++j)
                c3 += scale * problem.decay(grid.node(i - j)) * weights[j];
            const auto [b1, b2] = realline_boundary_B12(problem.decay, kernel, grid, i);
            sys.matrix(r, n - 1) -= c2 + b1;
            sys.matrix(r, 0) -= c3 + b2;
            sys.rhs[r] = problem.f(grid.node(i));
        }
        return sys;
    }

    RealLineProblem neumann_to_realline(const NeumannProblem &problem)
    {
        if (!(problem.L_tilde > 0.0))
            throw ParameterError("neumann_to_realline: requires L_tilde > 0");
        RealLineProblem out;
        out.decay = problem.decay;
        out.f = [f = problem.f, f_c = problem.f_c, Lt = problem.L_tilde](double x) {
            return std::abs(x) < Lt ? f(x) : f_c(x);
        };
        return out;
    }

    DiscreteSystem assemble(const ProblemSpec &spec, const Grid &grid, const WeightSet &weights)
    {
        return std::visit(
            [&](const auto &problem) -> DiscreteSystem {
                using T = std::decay_t<decltype(problem)>;
                if constexpr (std::is_same_v<T, DirichletProblem>)
                {
                    return assemble_dirichlet(problem, spec.kernel, grid, weights);
                }
                else if constexpr (std::is_same_v<T, RealLineProblem>)
                {
                    return assemble_realline(problem, spec.kernel, grid, weights);
                }
                else
                {
                    if (!(problem.L_tilde < grid.L))
                        throw ParameterError("assemble: Neumann problems need L_tilde < L");
                    auto sys = assemble_realline(neumann_to_realline(problem), spec.kernel, grid, weights);
                    sys.kind = ProblemKind::Neumann;
                    return sys;
                }
            },
            spec.variant);
    }
} // namespace nldiff
