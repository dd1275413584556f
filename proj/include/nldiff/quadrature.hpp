#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "nldiff/errors.hpp"

namespace nldiff
{
    using RealFunction = std::function<double(double)>;

    struct QuadratureResult
    {
        double value = 0.0;
        double abs_error_estimate = 0.0;
        long evaluations = 0;
    };

    struct QuadratureOptions
    {
        double abs_tol = 1e-12;
        double rel_tol = 1e-10;
        int max_subdivisions = 4000;

        /// Tolerance the result is held to: max(abs_tol, rel_tol * |value|).
        double target(double value) const { return std::max(abs_tol, rel_tol * std::abs(value)); }
    };

    /// Library-wide defaults; `NLDIFF_QUAD_TOL` in the environment overrides the absolute tolerance.
    QuadratureOptions default_quadrature_options();

    /// Certificate |f(y)| <= constant * exp(-rate * y) for all y beyond the lower limit.
    struct ExponentialDecay
    {
        double rate = 1.0;
        double constant = 1.0;
    };

    namespace detail
    {
        struct Segment
        {
            double a;
            double b;
            double value;
            double error;
            bool operator<(const Segment &other) const { return error < other.error; }
        };

        // 7-point Gauss / 15-point Kronrod pair, QUADPACK error heuristic.
        template <class Func>
        Segment gauss_kronrod_15(const Func &f, double a, double b)
        {
            static constexpr std::array<double, 8> xgk = {
                0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
            static constexpr std::array<double, 8> wgk = {
                0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
            static constexpr std::array<double, 4> wg = {
                0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

            const double center = 0.5 * (a + b);
            const double half = 0.5 * (b - a);

            std::array<double, 7> fv1{}, fv2{};
            const double fc = f(center);
            double resg = fc * wg[3];
            double resk = fc * wgk[7];
            double resabs = std::abs(resk);
            for (int j = 0; j < 7; ++j)
            {
                const double dx = half * xgk[j];
                fv1[j] = f(center - dx);
                fv2[j] = f(center + dx);
                const double sum = fv1[j] + fv2[j];
                resk += wgk[j] * sum;
                resabs += wgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
                if (j % 2 == 1)
                    resg += wg[j / 2] * sum;
            }
            const double reskh = 0.5 * resk;
            double resasc = wgk[7] * std::abs(fc - reskh);
            for (int j = 0; j < 7; ++j)
                resasc += wgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

            const double value = resk * half;
            resabs *= std::abs(half);
            resasc *= std::abs(half);
            double err = std::abs((resk - resg) * half);
            if (resasc != 0.0 && err != 0.0)
                err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
            constexpr double eps = std::numeric_limits<double>::epsilon();
            constexpr double uflow = std::numeric_limits<double>::min();
            if (resabs > uflow / (50.0 * eps))
                err = std::max(50.0 * eps * resabs, err);
            return {a, b, value, err};
        }
    } // namespace detail

    /// Globally adaptive Gauss-Kronrod integration over the panels delimited by `points`
    /// (strictly increasing, at least two entries). Kinks and discontinuities belong in `points`.
    template <class Func>
    QuadratureResult adaptive_quad_panels(const Func &f, std::span<const double> points,
                                          const QuadratureOptions &opts = default_quadrature_options())
    {
        if (points.size() < 2)
            throw ParameterError("adaptive_quad: need at least two breakpoints");
        if (!(opts.abs_tol > 0.0) && !(opts.rel_tol > 0.0))
            throw ParameterError("adaptive_quad: tolerance must be positive");
        for (std::size_t k = 1; k < points.size(); ++k)
            if (!(points[k] > points[k - 1]))
                throw ParameterError("adaptive_quad: breakpoints must be strictly increasing");

        std::priority_queue<detail::Segment> queue;
        double total = 0.0;
        double total_err = 0.0;
        long evaluations = 0;
        for (std::size_t k = 1; k < points.size(); ++k)
        {
            auto seg = detail::gauss_kronrod_15(f, points[k - 1], points[k]);
            evaluations += 15;
            total += seg.value;
            total_err += seg.error;
            queue.push(seg);
        }

        int subdivisions = 0;
        while (total_err > opts.target(total))
        {
            if (subdivisions >= opts.max_subdivisions)
                throw QuadratureError("adaptive_quad: no convergence within subdivision limit", total, total_err,
                                      opts.target(total));
            const auto worst = queue.top();
            const double mid = 0.5 * (worst.a + worst.b);
            if (!(mid > worst.a && mid < worst.b))
                throw QuadratureError("adaptive_quad: interval too small to subdivide", total, total_err,
                                      opts.target(total));
            queue.pop();
            const auto left = detail::gauss_kronrod_15(f, worst.a, mid);
            const auto right = detail::gauss_kronrod_15(f, mid, worst.b);
            evaluations += 30;
            total += left.value + right.value - worst.value;
            total_err += left.error + right.error - worst.error;
            queue.push(left);
            queue.push(right);
            ++subdivisions;
        }

        // Re-sum to shed the drift of the running updates.
        double value = 0.0;
        double err = 0.0;
        while (!queue.empty())
        {
            value += queue.top().value;
            err += queue.top().error;
            queue.pop();
        }
        return {value, err, evaluations};
    }

    template <class Func>
    QuadratureResult adaptive_quad(const Func &f, double a, double b,
                                   const QuadratureOptions &opts = default_quadrature_options())
    {
        if (!(a < b))
            throw ParameterError("adaptive_quad: requires a < b");
        const std::array<double, 2> pts{a, b};
        return adaptive_quad_panels(f, std::span<const double>(pts), opts);
    }

    /// Point beyond which the certified tail C e^{-rate y}/rate drops below tol / 10.
    inline double truncation_point(double a, const ExponentialDecay &decay, double tol)
    {
        if (!(decay.rate > 0.0) || !(decay.constant >= 0.0))
            throw ParameterError("decay certificate needs rate > 0 and constant >= 0");
        if (decay.constant == 0.0)
            return a + 1.0 / decay.rate;
        const double cut = std::log(10.0 * decay.constant / (decay.rate * tol)) / decay.rate;
        return std::max(cut, a + 1.0 / decay.rate);
    }

    /// Integral over [a, +inf) of an integrand carrying an exponential decay certificate.
    /// The certified truncation remainder is folded into the error estimate.
    template <class Func>
    QuadratureResult adaptive_quad_to_infinity(const Func &f, double a, const ExponentialDecay &decay,
                                               const QuadratureOptions &opts = default_quadrature_options())
    {
        const double tol = std::max(opts.abs_tol, std::numeric_limits<double>::min());
        const double cut = truncation_point(a, decay, tol);
        auto result = adaptive_quad(f, a, cut, opts);
        result.abs_error_estimate += decay.constant * std::exp(-decay.rate * cut) / decay.rate;
        return result;
    }

    /// Integral over (-inf, b]; the certificate is |f(y)| <= C e^{rate y} for y <= b.
    template <class Func>
    QuadratureResult adaptive_quad_from_neg_infinity(const Func &f, double b, const ExponentialDecay &decay,
                                                     const QuadratureOptions &opts = default_quadrature_options())
    {
        auto reflected = [&f](double y) { return f(-y); };
        return adaptive_quad_to_infinity(reflected, -b, decay, opts);
    }
} // namespace nldiff
