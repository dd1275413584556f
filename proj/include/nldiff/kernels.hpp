#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nldiff/quadrature.hpp"

namespace nldiff
{
    enum class SignClass
    {
        Nonnegative,
        MixedWithPositiveTail
    };

    /// One term a * exp(-b |y|) of an exponential-mixture kernel.
    struct ExponentialTerm
    {
        double amplitude;
        double rate;
    };

    /// Symmetric convolution kernel nu with optional closed forms.
    ///
    /// Everything except `evaluate` and `decay` is optional. Closed forms are used when
    /// present; every consumer falls back to adaptive quadrature driven by the decay
    /// certificate otherwise. The L1 norm is computed once at construction.
    class Kernel
    {
    public:
        struct Definition
        {
            std::string name;
            RealFunction evaluate;
            /// |nu(y)| <= constant * exp(-rate |y|)
            ExponentialDecay decay;
            SignClass sign_class = SignClass::Nonnegative;
            /// F' with (F')' = nu away from the origin
            RealFunction antiderivative_first;
            /// F with F'' = nu away from the origin
            RealFunction antiderivative_second;
            /// L_W -> int_{|y| >= L_W} nu
            RealFunction closed_tail_mass;
            /// (n, h) -> int_0^h y^n nu(y) dy
            std::function<double(int, double)> closed_partial_moment;
            /// Exact total mass when known; otherwise it is integrated.
            std::optional<double> mass;
            /// Set for exponential mixtures; enables closed-form boundary integrals.
            std::vector<ExponentialTerm> exponential_terms;
        };

        explicit Kernel(Definition def);

        double operator()(double y) const { return def_.evaluate(y); }

        const std::string &name() const { return def_.name; }
        const ExponentialDecay &decay() const { return def_.decay; }
        SignClass sign_class() const { return def_.sign_class; }
        double mass() const { return mass_; }
        double l1_norm() const { return l1_norm_; }

        bool has_antiderivatives() const { return def_.antiderivative_first && def_.antiderivative_second; }
        double antiderivative_first(double y) const { return def_.antiderivative_first(y); }
        double antiderivative_second(double y) const { return def_.antiderivative_second(y); }

        const RealFunction &closed_tail_mass() const { return def_.closed_tail_mass; }
        const std::function<double(int, double)> &closed_partial_moment() const { return def_.closed_partial_moment; }
        std::span<const ExponentialTerm> exponential_terms() const { return def_.exponential_terms; }

        /// Same kernel with every closed form removed, so all consumers take the quadrature path.
        Kernel without_closed_forms() const;

        const Definition &definition() const { return def_; }

    private:
        Definition def_;
        double mass_ = 1.0;
        double l1_norm_ = 1.0;
    };

    /// nu(y) = sum_k a_k exp(-b_k |y|), with all closed forms populated.
    Kernel exponential_mixture_kernel(std::vector<ExponentialTerm> terms, std::string name,
                                      SignClass sign_class = SignClass::Nonnegative);

    /// nu(y) = 1/2 exp(-|y|)
    Kernel laplace_kernel();

    /// nu(y) = 3/2 exp(-|y|) - 2 exp(-2|y|): negative near the origin, positive tails.
    Kernel mixed_sign_kernel();

    double eval_kernel(const Kernel &kernel, double y);

    /// Moment functionals of the singular-part expansion:
    /// f1 = h^-2 int_0^h y^2 nu, f2 = h^2 int_0^h y^2 nu, f3 = int_0^h y^4 nu, f4 = h^2 int_h^inf |nu|.
    double moment_f(const Kernel &kernel, double h, int index);

    /// A = int_{|y| >= L_W} nu(y) dy
    double tail_mass(const Kernel &kernel, double L_W);

    /// int_a^b g(y) nu(y) dy over a kernel-weighted half line, i.e. [a, inf) with a >= 0,
    /// using the kernel certificate times `bound` (a sup bound of |g| on the range).
    template <class Func>
    QuadratureResult kernel_weighted_tail(const Kernel &kernel, const Func &g, double a, double bound,
                                          const QuadratureOptions &opts)
    {
        const auto &d = kernel.decay();
        auto integrand = [&](double y) { return g(y) * kernel(y); };
        return adaptive_quad_to_infinity(integrand, a, ExponentialDecay{d.rate, d.constant * bound}, opts);
    }

    struct KernelValidationReport
    {
        double mass = 0.0;
        double first_moment = 0.0;
        double second_moment = 0.0;
        double fourth_moment = 0.0;
        /// L -> int_{|y| > 2L} nu
        std::map<double, double> tail_positivity;

        bool mass_passed = false;
        bool first_moment_passed = false;
        bool second_moment_finite = false;
        bool fourth_moment_finite = false;
        bool tails_positive = false;
        bool symmetric = false;
        bool sign_class_consistent = false;
        bool antiderivatives_consistent = false;

        bool passed() const
        {
            return mass_passed && first_moment_passed && second_moment_finite && fourth_moment_finite &&
                   tails_positive && symmetric && sign_class_consistent && antiderivatives_consistent;
        }
    };

    KernelValidationReport validate_kernel(const Kernel &kernel, std::span<const double> tail_check_Ls,
                                           double tol = 1e-8);
} // namespace nldiff
