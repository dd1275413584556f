#include "nldiff/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "nldiff/errors.hpp"

namespace nldiff
{
    Solution solve(const DiscreteSystem &system)
    {
        const auto n = system.matrix.rows();
        if (n == 0 || system.matrix.cols() != n || system.rhs.size() != n)
            throw ParameterError("solve: matrix must be square and match the right-hand side");

        Eigen::PartialPivLU<Eigen::MatrixXd> lu(system.matrix);
        // Eigen skips exactly-zero pivots when estimating rcond, so the pivot spread bounds it too.
        const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
        const double rcond = std::min(lu.rcond(), pivots.minCoeff() / pivots.maxCoeff());
        if (!(rcond > std::numeric_limits<double>::epsilon()))
            throw SingularMatrixError("solve: matrix is singular to working precision",
                                      rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity());

        Eigen::VectorXd u = lu.solve(system.rhs);
        Eigen::VectorXd r = system.matrix * u - system.rhs;

        const double norm_N = system.matrix.cwiseAbs().rowwise().sum().maxCoeff();
        auto bound = [&] { return 1e-10 * (norm_N * u.lpNorm<Eigen::Infinity>() + system.rhs.lpNorm<Eigen::Infinity>()); };
        if (r.lpNorm<Eigen::Infinity>() > bound())
        {
            // one step of iterative refinement
            u -= lu.solve(r);
            r = system.matrix * u - system.rhs;
        }

        Solution sol;
        sol.values = std::move(u);
        sol.first_index = system.first_index;
        sol.grid = system.grid;
        sol.kind = system.kind;
        sol.tail = system.decay;
        sol.residual_inf = r.lpNorm<Eigen::Infinity>();
        sol.residual_bound = bound();
        sol.rcond = rcond;
        return sol;
    }

    double evaluate_solution(const Solution &sol, double x, const RealFunction &exterior)
    {
        const Grid &grid = sol.grid;
        const double L = grid.L;
        const int half = grid.M / 2;

        if (sol.tail)
        {
            if (x >= L)
                return sol.at(half) * std::pow(L / x, sol.tail->q);
            if (x <= -L)
                return sol.at(-half) * std::pow(L / -x, sol.tail->q);
        }
        else
        {
            if (!exterior)
                throw ParameterError("evaluate_solution: Dirichlet solutions need exterior data");
            if (std::abs(x) >= L)
                return exterior(x);
        }

        // Node values, with the exterior data standing in at +-L for Dirichlet solutions.
        auto value = [&](int k) {
            if (k < sol.first_index || k > sol.last_index())
                return exterior(grid.node(k));
            return sol.at(k);
        };
        const double s = x / grid.h;
        int k = static_cast<int>(std::floor(s));
        k = std::clamp(k, -half, half - 1);
        const double t = s - k;
        if (t == 0.0)
            return value(k);
        return (1.0 - t) * value(k) + t * value(k + 1);
    }

    double symbol_sample(const Kernel &kernel, double L, int j)
    {
        if (!(L > 0.0))
            throw ParameterError("symbol_sample: requires L > 0");
        if (j < 0)
            throw ParameterError("symbol_sample: requires j >= 0");

        // 1 - int cos(kx) nu = (1 - mass) + tail(2L) + int_{-2L}^{2L} 2 sin^2(kx/2) nu
        const double base = (1.0 - kernel.mass()) + tail_mass(kernel, 2.0 * L);
        if (j == 0)
            return base;

        const double k = j * std::numbers::pi / (2.0 * L);
        // Panels between consecutive zeros and maxima of sin^2(kx/2) on [0, 2L].
        const int panels = std::max(2, j);
        std::vector<double> points(static_cast<std::size_t>(panels + 1));
        for (int m = 0; m <= panels; ++m)
            points[static_cast<std::size_t>(m)] = 2.0 * L * m / panels;

        QuadratureOptions opts;
        opts.abs_tol = 1e-14;
        opts.rel_tol = 1e-11;
        auto integrand = [&](double x) {
            const double s = std::sin(0.5 * k * x);
            return 4.0 * s * s * kernel(x);
        };
        return base + adaptive_quad_panels(integrand, points, opts).value;
    }

    StabilityReport stability_report(const DiscreteSystem &system, const Kernel &kernel, const Grid &grid)
    {
        if (system.matrix.rows() == 0 || system.grid.M != grid.M || system.grid.L != grid.L)
            throw ParameterError("stability_report: system was not assembled on this grid");

        StabilityReport report;
        report.lambda.resize(static_cast<std::size_t>(grid.M + 1));
        for (int j = 0; j <= grid.M; ++j)
            report.lambda[static_cast<std::size_t>(j)] = symbol_sample(kernel, grid.L, j);

        if (system.kind == ProblemKind::Dirichlet)
        {
            report.lambda_min_bound = *std::min_element(report.lambda.begin(), report.lambda.end());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(system.matrix, Eigen::EigenvaluesOnly);
            if (eig.info() != Eigen::Success)
                throw EigenSolverError("stability_report: symmetric eigen-solver did not converge");
            report.min_eigenvalue = eig.eigenvalues().minCoeff();
            report.stable = *report.min_eigenvalue > 0.0;
        }
        else
        {
            const double q = system.decay ? system.decay->q : 0.0;
            report.lambda_min_bound = (1.0 - std::pow(3.0, -q)) * tail_mass(kernel, 2.0 * grid.L_W);
            const Eigen::MatrixXd Z = Eigen::MatrixXd::Identity(system.size(), system.size()) - system.matrix;
            report.z_inf_norm = Z.cwiseAbs().rowwise().sum().maxCoeff();
            report.stable = *report.z_inf_norm < 1.0;
        }
        return report;
    }

    ErrorNorms error_norms(const Solution &sol, const RealFunction &exact)
    {
        ErrorNorms out;
        double sum = 0.0;
        for (int k = sol.first_index; k <= sol.last_index(); ++k)
        {
            const double e = std::abs(sol.at(k) - exact(sol.grid.node(k)));
            out.linf = std::max(out.linf, e);
            sum += e * e;
        }
        out.l2 = std::sqrt(sum);
        out.l2_weighted = std::sqrt(sol.grid.h * sum);
        return out;
    }
} // namespace nldiff
