#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <variant>

#include <Eigen/Core>

#include "nldiff/grid_weights.hpp"
#include "nldiff/kernels.hpp"

namespace nldiff
{
    /// Algebraic envelope g(x) = |x|^{-q} assumed for the solution outside [-L, L].
    struct DecayModel
    {
        double q = 2.0;

        double operator()(double x) const { return std::pow(std::abs(x), -q); }
    };

    /// |g(x)| <= constant * (1 + |x|)^exponent
    struct GrowthCertificate
    {
        double constant = 1.0;
        double exponent = 0.0;
    };

    struct DirichletProblem
    {
        RealFunction f;
        /// Prescribed values on (-L, L)^c.
        RealFunction exterior;
        std::optional<GrowthCertificate> exterior_growth;
        /// Optional closed form (x_i, L_W) -> B_i.
        std::function<double(double, double)> closed_B;
    };

    struct RealLineProblem
    {
        RealFunction f;
        DecayModel decay;
    };

    struct NeumannProblem
    {
        RealFunction f;
        RealFunction f_c;
        double L_tilde = 1.0;
        DecayModel decay;
    };

    using ProblemVariant = std::variant<DirichletProblem, RealLineProblem, NeumannProblem>;

    struct ProblemSpec
    {
        ProblemVariant variant;
        Kernel kernel;
    };

    enum class ProblemKind
    {
        Dirichlet,
        RealLine,
        Neumann
    };

    const char *to_string(ProblemKind kind);

    /// Assembled system N u = rhs. Unknown k of the solve vector is the node x_{first_index + k}.
    struct DiscreteSystem
    {
        Eigen::MatrixXd matrix;
        Eigen::VectorXd rhs;
        ProblemKind kind = ProblemKind::Dirichlet;
        Grid grid;
        int first_index = 0;
        /// Set for RealLine / Neumann systems.
        std::optional<DecayModel> decay;
        /// Set for Dirichlet systems.
        RealFunction exterior;

        int size() const { return static_cast<int>(rhs.size()); }
        int last_index() const { return first_index + size() - 1; }
    };

    /// B_i = int_{|y| >= L_W} g(x_i - y) nu(y) dy, for -M/2 + 1 <= i <= M/2 - 1.
    double dirichlet_boundary_B(const DirichletProblem &problem, const Kernel &kernel, const Grid &grid, int i);

    /// (B1_i, B2_i): the far-field integrals over y <= -L_W and y >= L_W of g(x_i - y) nu(y) / g(L).
    /// B1_i samples the solution right of L, B2_i the solution left of -L.
    std::pair<double, double> realline_boundary_B12(const DecayModel &decay, const Kernel &kernel, const Grid &grid,
                                                    int i);

    DiscreteSystem assemble_dirichlet(const DirichletProblem &problem, const Kernel &kernel, const Grid &grid,
                                      const WeightSet &weights);

    DiscreteSystem assemble_realline(const RealLineProblem &problem, const Kernel &kernel, const Grid &grid,
                                     const WeightSet &weights);

    /// Forcing f-bar: f on (-L~, L~), f_c on |x| >= L~.
    RealLineProblem neumann_to_realline(const NeumannProblem &problem);

    /// Dispatch on the problem variant. Neumann problems require L~ < L.
    DiscreteSystem assemble(const ProblemSpec &spec, const Grid &grid, const WeightSet &weights);
} // namespace nldiff
