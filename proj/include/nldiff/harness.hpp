#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nldiff/solver.hpp"

namespace nldiff
{
    /// Closed-form data of the built-in experiments, shared by the registry and the tests.
    namespace problems
    {
        double sech(double x);

        /// Forcing whose solution under the Laplace kernel is sech.
        double laplace_sech_forcing(double x);
        /// B_i for sech exterior data and the Laplace kernel.
        double laplace_sech_B(double x, double L_W);

        /// Forcing whose solution under the mixed-sign kernel is sech.
        double mixed_sech_forcing(double x);
        /// B_i for sech exterior data and the mixed-sign kernel.
        double mixed_sech_B(double x, double L_W);
        /// The tail mass as printed alongside the mixed-sign experiment (fails cross-validation).
        double mixed_printed_tail_mass(double L_W);

        /// 1/(1+x^2) - 1/2 [1/(1+(x-a)^2) + 1/(1+(x+a)^2)]
        double algebraic_forcing(double x, double a = 1.0);
        /// Whole-line solution for algebraic_forcing under the Laplace kernel; ~ 1/(2x^2) at infinity.
        double algebraic_solution(double x, double a = 1.0);

        /// x^2 - 2/3 on (-1, 1), x^{-4} on |x| >= 1
        double discontinuous_forcing(double x);
        double discontinuous_solution(double x);
    } // namespace problems

    /// |f(x)| <= constant |x|^{-exponent} for |x| >= start.
    struct AlgebraicDecay
    {
        double exponent = 2.0;
        double start = 1.0;
        double constant = 1.0;
    };

    /// Exponential certificates hold on the whole line: |f(x)| <= constant e^{-rate |x|}.
    using DecayCertificate = std::variant<ExponentialDecay, AlgebraicDecay>;

    struct RegisteredProblem
    {
        std::string id;
        std::string notes;
        double expected_order = 2.0;
        /// Problem spec for the nominal half-width L.
        std::function<ProblemSpec(double L)> make_spec;
        RealFunction exact_solution;
        /// The grid spans domain_factor * L with domain_factor * M intervals (same h).
        int domain_factor = 1;
        /// Set when the forcing is meant to satisfy <f,1> = <f,x> = 0.
        std::optional<DecayCertificate> forcing_decay;
        RealFunction forcing;
        std::vector<double> forcing_breakpoints;
    };

    /// Immutable list built once on first use.
    const std::vector<RegisteredProblem> &registry();
    /// Throws ParameterError for unknown ids.
    const RegisteredProblem &find_problem(const std::string &id);
    /// Messages from the closed-form cross-validation performed while building the registry.
    const std::vector<std::string> &registry_warnings();

    struct CompatibilityResult
    {
        double mean = 0.0;
        double first_moment = 0.0;
        bool passed = false;
    };

    /// Quadrature values of int f and int x f over the real line; passed iff both are within tol.
    CompatibilityResult compatibility_check(const RealFunction &f, const DecayCertificate &certificate, double tol,
                                            std::span<const double> breakpoints = {});

    struct ConvergenceRow
    {
        std::string problem;
        double L = 0.0;
        int M = 0;
        double h = 0.0;
        double linf_error = 0.0;
        double fitted_order = 0.0;
        double runtime_ms = 0.0;
        bool failed = false;
        std::string failure;
    };

    struct ConvergenceReport
    {
        /// Sorted by L, then h descending.
        std::vector<ConvergenceRow> rows;
        /// Least-squares slope of log(error) against log(h), per L; NaN with fewer than 3 usable points.
        std::map<double, double> fitted_order;
    };

    struct SweepOptions
    {
        /// 0 picks the hardware concurrency.
        unsigned workers = 0;
    };

    /// Every (L, M) pair is assembled and solved; failures become rows, not exceptions.
    ConvergenceReport run_convergence(const std::string &problem_id, std::span<const double> Ls,
                                      std::span<const int> Ms, const SweepOptions &options = {});

    /// Same sweep with M = 2L/h per L.
    ConvergenceReport run_convergence_h(const std::string &problem_id, std::span<const double> Ls,
                                        std::span<const double> hs, const SweepOptions &options = {});

    /// The slope fit used by run_convergence. `scale` is |u|_inf; errors below 100 eps scale are skipped.
    double fit_order(std::span<const double> hs, std::span<const double> errors, double scale);

    inline constexpr const char *csv_header = "problem,L,M,h,linf_error,fitted_order,runtime_ms";

    void emit_csv(const ConvergenceReport &report, std::ostream &out);
    /// Writes to a file; throws Error when the file cannot be written.
    void emit_csv(const ConvergenceReport &report, const std::string &path);
    /// Inverse of emit_csv.
    ConvergenceReport parse_csv(std::istream &in);
} // namespace nldiff
