#include "nldiff/special_functions.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "nldiff/errors.hpp"

namespace nldiff
{
    namespace
    {
        constexpr double kEulerGamma = 0.57721566490153286061;
        constexpr double kEps = std::numeric_limits<double>::epsilon();

        // zeta(2) .. zeta(20)
        constexpr std::array<double, 19> kZeta = {
            1.6449340668482264365, 1.2020569031595942854, 1.0823232337111381915, 1.0369277551433699263,
            1.0173430619844491397, 1.0083492773819228268, 1.0040773561979443394, 1.0020083928260822144,
            1.0009945751278180853, 1.0004941886041194646, 1.0002460865533080483, 1.0001227133475784891,
            1.0000612481350587048, 1.0000305882363070205, 1.0000152822594086519, 1.0000076371976378998,
            1.0000038172932649998, 1.0000019082127165539, 1.0000009539620338728};

        // lgamma(1 + e) / e, including the e -> 0 limit.
        double lgamma1p_over(double e)
        {
            if (std::abs(e) > 0.1)
                return std::lgamma(1.0 + e) / e;
            double sum = -kEulerGamma;
            double power = 1.0; // (-e)^{k-1}
            for (std::size_t k = 2; k < kZeta.size() + 2; ++k)
            {
                power *= -e;
                sum -= power * kZeta[k - 2] / static_cast<double>(k);
            }
            return sum;
        }

        // Series for x <= 1. Works for any p > 0; when p sits near an integer n >= 1 the
        // Gamma(1-p) x^{p-1} term and the k = n-1 series term are combined so the pole cancels.
        double series(double p, double x)
        {
            const long n = std::lround(p);
            const double e = static_cast<double>(n) - p;

            double sum = 0.0;
            double term = 1.0; // (-x)^k / k!
            for (long k = 0; k < 200; ++k)
            {
                if (k > 0)
                    term *= -x / static_cast<double>(k);
                if (n >= 1 && k == n - 1)
                    continue;
                const double contribution = -term / (1.0 - p + static_cast<double>(k));
                sum += contribution;
                if (k > n && std::abs(contribution) < kEps * std::abs(sum))
                    break;
            }

            if (n >= 1)
            {
                // (G - 1)/e with log G = -e ln x + lgamma(1+e) - sum_{m<n} log1p(-e/m)
                double log_g_over_e = -std::log(x) + lgamma1p_over(e);
                for (long m = 1; m < n; ++m)
                {
                    const double r = 1.0 / static_cast<double>(m);
                    log_g_over_e -= (e == 0.0) ? -r : std::log1p(-e * r) / e;
                }
                const double ratio = (e == 0.0) ? log_g_over_e : std::expm1(e * log_g_over_e) / e;
                double lead = 1.0; // (-x)^{n-1} / (n-1)!
                for (long m = 1; m < n; ++m)
                    lead *= -x / static_cast<double>(m);
                sum += lead * ratio;
            }
            else
            {
                sum += std::tgamma(1.0 - p) * std::pow(x, p - 1.0);
            }
            return sum;
        }

        // Modified Lentz evaluation of the continued fraction for e^x E_p(x), x > 1.
        double continued_fraction_scaled(double p, double x)
        {
            constexpr double tiny = 1e-300;
            double b = x + p;
            double c = 1.0 / tiny;
            double d = 1.0 / b;
            double h = d;
            for (int i = 1; i < 10000; ++i)
            {
                const double an = -static_cast<double>(i) * (p - 1.0 + static_cast<double>(i));
                b += 2.0;
                d = an * d + b;
                if (std::abs(d) < tiny)
                    d = tiny;
                c = b + an / c;
                if (std::abs(c) < tiny)
                    c = tiny;
                d = 1.0 / d;
                const double del = c * d;
                h *= del;
                if (std::abs(del - 1.0) < kEps)
                    return h;
            }
            throw Error("exp_int: continued fraction failed to converge");
        }

        void check_domain(double p, double x)
        {
            if (!(x > 0.0))
                throw DomainError("exp_int: requires x > 0");
            if (!(p > 0.0))
                throw DomainError("exp_int: requires p > 0");
        }
    } // namespace

    double exp_int(double p, double x)
    {
        check_domain(p, x);
        if (x <= 1.0)
            return series(p, x);
        return continued_fraction_scaled(p, x) * std::exp(-x);
    }

    double exp_int_scaled(double p, double x)
    {
        check_domain(p, x);
        if (x <= 1.0)
            return series(p, x) * std::exp(x);
        return continued_fraction_scaled(p, x);
    }

    double t_minus_atan(double t)
    {
        if (std::abs(t) >= 0.2)
            return t - std::atan(t);
        const double t2 = t * t;
        double power = t * t2;
        double sum = 0.0;
        for (int k = 1; k < 14; ++k)
        {
            const double term = power / static_cast<double>(2 * k + 1);
            sum += (k % 2 == 1) ? term : -term;
            power *= t2;
        }
        return sum;
    }
} // namespace nldiff
