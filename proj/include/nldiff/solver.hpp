#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "nldiff/assembly.hpp"

namespace nldiff
{
    /// Grid solution plus the rule used to extend it beyond [-L, L].
    struct Solution
    {
        Eigen::VectorXd values; // values[k] = u at node first_index + k
        int first_index = 0;
        Grid grid;
        ProblemKind kind = ProblemKind::Dirichlet;
        /// Decay tail u(x) = u(+-L) (L/|x|)^q; unset for Dirichlet solutions.
        std::optional<DecayModel> tail;
        double residual_inf = 0.0;
        /// 1e-10 (|N| |u| + |rhs|), the admissible residual
        double residual_bound = 0.0;
        /// Reciprocal condition estimate of N in the 1-norm.
        double rcond = 0.0;

        int last_index() const { return first_index + static_cast<int>(values.size()) - 1; }
        double at(int node) const { return values[node - first_index]; }
    };

    /// Partial-pivoting LU. Throws SingularMatrixError when N is singular to working precision.
    Solution solve(const DiscreteSystem &system);

    /// Interior points interpolate linearly between nodes. Outside [-L, L] Dirichlet solutions
    /// return exterior(x) (required) and decaying solutions follow the tail rule.
    double evaluate_solution(const Solution &sol, double x, const RealFunction &exterior = {});

    /// Lambda_j = 1 - int_{-2L}^{2L} nu(x) cos(j pi x / 2L) dx, evaluated without cancellation.
    double symbol_sample(const Kernel &kernel, double L, int j);

    struct StabilityReport
    {
        std::vector<double> lambda; // j = 0..M
        double lambda_min_bound = 0.0;
        std::optional<double> min_eigenvalue; // Dirichlet
        std::optional<double> z_inf_norm;     // RealLine / Neumann
        bool stable = false;
    };

    StabilityReport stability_report(const DiscreteSystem &system, const Kernel &kernel, const Grid &grid);

    struct ErrorNorms
    {
        double linf = 0.0;
        /// sqrt(sum e_i^2)
        double l2 = 0.0;
        /// sqrt(h sum e_i^2)
        double l2_weighted = 0.0;
    };

    /// Nodal errors against an exact solution.
    ErrorNorms error_norms(const Solution &sol, const RealFunction &exact);
} // namespace nldiff
