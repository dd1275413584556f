#include "nldiff/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "nldiff/errors.hpp"

namespace nldiff
{
    namespace
    {
        // Relative-accuracy mode for integrals whose magnitude is not known in advance.
        QuadratureOptions relative_options()
        {
            QuadratureOptions opts;
            opts.abs_tol = 1e-300;
            opts.rel_tol = 1e-12;
            return opts;
        }

        template <class Func>
        double whole_line(const Kernel &kernel, const Func &g, const QuadratureOptions &opts)
        {
            auto right = [&](double y) { return g(y) * kernel(y); };
            auto left = [&](double y) { return g(-y) * kernel(-y); };
            // |g| is y^k with k <= 4: y^k e^{-eta y / 2} <= 1 + (8 / (e eta))^4, so halve the rate.
            const auto &d = kernel.decay();
            const double rate = 0.5 * d.rate;
            const double constant = d.constant * (1.0 + std::pow(8.0 / (std::exp(1.0) * d.rate), 4.0));
            const ExponentialDecay cert{rate, constant};
            return adaptive_quad_to_infinity(right, 0.0, cert, opts).value +
                   adaptive_quad_to_infinity(left, 0.0, cert, opts).value;
        }

        // 1 - e^{-t} sum_{k<=n} t^k/k!, i.e. the regularized lower incomplete gamma P(n+1, t).
        double lower_gamma_regularized(int n, double t)
        {
            if (t <= 0.0)
                return 0.0;
            if (t < static_cast<double>(n) + 1.0)
            {
                double term = 1.0;
                for (int k = 1; k <= n + 1; ++k)
                    term *= t / static_cast<double>(k);
                double sum = 0.0;
                for (int k = n + 1; k < n + 200; ++k)
                {
                    sum += term;
                    term *= t / static_cast<double>(k + 1);
                    if (term < std::numeric_limits<double>::epsilon() * sum)
                        break;
                }
                return std::exp(-t) * sum;
            }
            double term = 1.0;
            double sum = 1.0;
            for (int k = 1; k <= n; ++k)
            {
                term *= t / static_cast<double>(k);
                sum += term;
            }
            return 1.0 - std::exp(-t) * sum;
        }
    } // namespace

    Kernel::Kernel(Definition def) : def_(std::move(def))
    {
        if (!def_.evaluate)
            throw ParameterError("Kernel: evaluate must be provided");
        if (!(def_.decay.rate > 0.0) || !(def_.decay.constant > 0.0))
            throw ParameterError("Kernel: decay certificate needs positive rate and constant");

        const auto opts = relative_options();
        const ExponentialDecay &d = def_.decay;
        auto abs_right = [this](double y) { return std::abs(def_.evaluate(y)); };
        auto abs_left = [this](double y) { return std::abs(def_.evaluate(-y)); };
        l1_norm_ = adaptive_quad_to_infinity(abs_right, 0.0, d, opts).value +
                   adaptive_quad_to_infinity(abs_left, 0.0, d, opts).value;

        if (def_.mass)
        {
            mass_ = *def_.mass;
        }
        else
        {
            auto right = [this](double y) { return def_.evaluate(y); };
            auto left = [this](double y) { return def_.evaluate(-y); };
            mass_ = adaptive_quad_to_infinity(right, 0.0, d, opts).value +
                    adaptive_quad_to_infinity(left, 0.0, d, opts).value;
        }
    }

    Kernel Kernel::without_closed_forms() const
    {
        Definition stripped;
        stripped.name = def_.name + " (quadrature)";
        stripped.evaluate = def_.evaluate;
        stripped.decay = def_.decay;
        stripped.sign_class = def_.sign_class;
        stripped.mass = def_.mass;
        return Kernel(std::move(stripped));
    }

    Kernel exponential_mixture_kernel(std::vector<ExponentialTerm> terms, std::string name, SignClass sign_class)
    {
        if (terms.empty())
            throw ParameterError("exponential_mixture_kernel: no terms");
        double min_rate = std::numeric_limits<double>::infinity();
        double constant = 0.0;
        double mass = 0.0;
        for (const auto &t : terms)
        {
            if (!(t.rate > 0.0))
                throw ParameterError("exponential_mixture_kernel: rates must be positive");
            min_rate = std::min(min_rate, t.rate);
            constant += std::abs(t.amplitude);
            mass += 2.0 * t.amplitude / t.rate;
        }

        Kernel::Definition def;
        def.name = std::move(name);
        def.sign_class = sign_class;
        def.decay = {min_rate, constant};
        def.mass = mass;
        def.exponential_terms = terms;
        def.evaluate = [terms](double y) {
            double s = 0.0;
            for (const auto &t : terms)
                s += t.amplitude * std::exp(-t.rate * std::abs(y));
            return s;
        };
        def.antiderivative_second = [terms](double y) {
            double s = 0.0;
            for (const auto &t : terms)
                s += t.amplitude / (t.rate * t.rate) * std::exp(-t.rate * std::abs(y));
            return s;
        };
        def.antiderivative_first = [terms](double y) {
            if (y == 0.0)
                return 0.0;
            double s = 0.0;
            for (const auto &t : terms)
                s += t.amplitude / t.rate * std::exp(-t.rate * std::abs(y));
            return y > 0.0 ? -s : s;
        };
        def.closed_tail_mass = [terms](double L_W) {
            double s = 0.0;
            for (const auto &t : terms)
                s += 2.0 * t.amplitude / t.rate * std::exp(-t.rate * L_W);
            return s;
        };
        def.closed_partial_moment = [terms](int n, double h) {
            double factorial = 1.0;
            for (int k = 2; k <= n; ++k)
                factorial *= static_cast<double>(k);
            double s = 0.0;
            for (const auto &t : terms)
                s += t.amplitude * factorial / std::pow(t.rate, n + 1) * lower_gamma_regularized(n, t.rate * h);
            return s;
        };
        return Kernel(std::move(def));
    }

    Kernel laplace_kernel() { return exponential_mixture_kernel({{0.5, 1.0}}, "laplace"); }

    Kernel mixed_sign_kernel()
    {
        return exponential_mixture_kernel({{1.5, 1.0}, {-2.0, 2.0}}, "mixed-sign", SignClass::MixedWithPositiveTail);
    }

    double eval_kernel(const Kernel &kernel, double y) { return kernel(y); }

    namespace
    {
        double partial_moment(const Kernel &kernel, int n, double h)
        {
            if (kernel.closed_partial_moment())
                return kernel.closed_partial_moment()(n, h);
            auto opts = default_quadrature_options();
            opts.abs_tol *= std::pow(h, n + 1);
            auto integrand = [&](double y) { return std::pow(y, n) * kernel(y); };
            return adaptive_quad(integrand, 0.0, h, opts).value;
        }
    } // namespace

    double moment_f(const Kernel &kernel, double h, int index)
    {
        if (!(h > 0.0))
            throw ParameterError("moment_f: requires h > 0");
        switch (index)
        {
        case 1:
            return partial_moment(kernel, 2, h) / (h * h);
        case 2:
            return h * h * partial_moment(kernel, 2, h);
        case 3:
            return partial_moment(kernel, 4, h);
        case 4:
        {
            if (kernel.sign_class() == SignClass::Nonnegative && kernel.closed_tail_mass())
                return h * h * 0.5 * kernel.closed_tail_mass()(h);
            auto opts = relative_options();
            auto abs_nu = [&](double y) { return std::abs(kernel(y)); };
            return h * h * adaptive_quad_to_infinity(abs_nu, h, kernel.decay(), opts).value;
        }
        default:
            throw ParameterError("moment_f: index must be 1, 2, 3 or 4");
        }
    }

    double tail_mass(const Kernel &kernel, double L_W)
    {
        if (!(L_W > 0.0))
            throw ParameterError("tail_mass: requires L_W > 0");
        if (kernel.closed_tail_mass())
            return kernel.closed_tail_mass()(L_W);
        const auto opts = relative_options();
        auto right = [&](double y) { return kernel(y); };
        auto left = [&](double y) { return kernel(-y); };
        return adaptive_quad_to_infinity(right, L_W, kernel.decay(), opts).value +
               adaptive_quad_to_infinity(left, L_W, kernel.decay(), opts).value;
    }

    KernelValidationReport validate_kernel(const Kernel &kernel, std::span<const double> tail_check_Ls, double tol)
    {
        if (!(tol > 0.0))
            throw ParameterError("validate_kernel: requires tol > 0");

        KernelValidationReport report;
        QuadratureOptions opts;
        opts.abs_tol = 1e-14;
        opts.rel_tol = 1e-12;

        auto moment = [&](int k, bool &ok) {
            try
            {
                const double v = whole_line(kernel, [k](double y) { return std::pow(y, k); }, opts);
                ok = std::isfinite(v);
                return v;
            }
            catch (const QuadratureError &e)
            {
                ok = false;
                return e.estimate();
            }
        };
        bool ok0 = false, ok1 = false;
        report.mass = moment(0, ok0);
        report.first_moment = moment(1, ok1);
        report.second_moment = moment(2, report.second_moment_finite);
        report.fourth_moment = moment(4, report.fourth_moment_finite);
        report.mass_passed = ok0 && std::abs(report.mass - 1.0) <= tol;
        report.first_moment_passed = ok1 && std::abs(report.first_moment) <= tol;

        report.tails_positive = true;
        for (double L : tail_check_Ls)
        {
            const double tail = tail_mass(kernel, 2.0 * L);
            report.tail_positivity[L] = tail;
            report.tails_positive = report.tails_positive && tail > 0.0;
        }

        // Probe grid: 1001 points on [-20/eta, 20/eta].
        const double extent = 20.0 / kernel.decay().rate;
        constexpr int probes = 1001;
        report.symmetric = true;
        report.sign_class_consistent = true;
        report.antiderivatives_consistent = true;
        for (int k = 0; k < probes; ++k)
        {
            const double y = -extent + 2.0 * extent * k / (probes - 1);
            const double v = kernel(y);
            if (std::abs(v - kernel(-y)) > 1e-12 * std::max(1.0, std::abs(v)))
                report.symmetric = false;
            if (kernel.sign_class() == SignClass::Nonnegative && v < 0.0)
                report.sign_class_consistent = false;
            if (kernel.has_antiderivatives())
            {
                const double step = 1e-5 * std::max(1.0, std::abs(y));
                if (std::abs(y) <= 2.0 * step)
                    continue;
                const double dF1 =
                    (kernel.antiderivative_first(y + step) - kernel.antiderivative_first(y - step)) / (2.0 * step);
                const double dF2 =
                    (kernel.antiderivative_second(y + step) - kernel.antiderivative_second(y - step)) / (2.0 * step);
                const double scale = 1.0 + std::abs(v);
                if (std::abs(dF1 - v) > 1e-6 * scale ||
                    std::abs(dF2 - kernel.antiderivative_first(y)) > 1e-6 * (1.0 + std::abs(dF2)))
                    report.antiderivatives_consistent = false;
            }
        }
        return report;
    }
} // namespace nldiff
