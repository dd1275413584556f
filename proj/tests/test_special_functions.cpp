#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nldiff/quadrature.hpp"
#include "nldiff/special_functions.hpp"

using namespace nldiff;

namespace
{
    // Independent oracle: z = e^s turns the E_p integrand into a doubly-exponentially decaying one.
    double exp_int_oracle(double p, double x)
    {
        QuadratureOptions opts;
        opts.abs_tol = 1e-300;
        opts.rel_tol = 5e-14;
        const double S = std::log(800.0 / x);
        auto g = [&](double s) { return std::exp((1.0 - p) * s - x * std::exp(s)); };
        return adaptive_quad(g, 0.0, std::max(S, 1.0), opts).value;
    }

    double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
} // namespace

TEST_CASE("adaptive_quad integrates polynomials exactly")
{
    const auto r = adaptive_quad([](double x) { return x * x; }, 0.0, 1.0);
    CHECK(std::abs(r.value - 1.0 / 3.0) <= 1e-12);
    CHECK(r.abs_error_estimate >= 0.0);
    CHECK(r.evaluations > 0);
}

TEST_CASE("semi-infinite integral with a decay certificate")
{
    const auto r = adaptive_quad_to_infinity([](double y) { return std::exp(-y); }, 0.0, {1.0, 1.0});
    CHECK(std::abs(r.value - 1.0) <= 1e-10);
    const auto l = adaptive_quad_from_neg_infinity([](double y) { return std::exp(y); }, 0.0, {1.0, 1.0});
    CHECK(std::abs(l.value - 1.0) <= 1e-10);
}

TEST_CASE("hat against the shifted Laplace kernel matches the antiderivative closed forms")
{
    const double h = 0.5, x1 = 0.5, x2 = 1.0;
    auto F = [](double y) { return 0.5 * std::exp(-std::abs(y)); };
    auto Fp = [](double y) { return -0.5 * (y > 0 ? 1.0 : -1.0) * std::exp(-std::abs(y)); };
    auto T = [h](double z) { return std::max(0.0, 1.0 - std::abs(z) / h); };
    auto integrand = [&](double z) { return T(z) * 0.5 * std::exp(-std::abs(z + x1)); };

    // The half of the hat lying in |y| >= h is the first-weight closed form.
    const double outer = adaptive_quad(integrand, 0.0, h).value;
    CHECK(std::abs(outer - (-Fp(x1) + (F(x2) - F(x1)) / h)) <= 1e-13);

    // The full hat is the interior second difference.
    const std::array<double, 3> pts{-h, 0.0, h};
    const double full = adaptive_quad_panels(integrand, pts).value;
    CHECK(std::abs(full - (F(x2) - 2.0 * F(x1) + F(0.0)) / h) <= 1e-13);
}

TEST_CASE("adaptive_quad rejects bad input and reports non-convergence")
{
    CHECK_THROWS_AS(adaptive_quad([](double x) { return x; }, 1.0, 0.0), ParameterError);
    QuadratureOptions opts;
    opts.max_subdivisions = 3;
    opts.abs_tol = 1e-15;
    opts.rel_tol = 0.0;
    try
    {
        adaptive_quad([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, opts);
        FAIL("expected QuadratureError");
    }
    catch (const QuadratureError &e)
    {
        CHECK(e.error_estimate() > e.tolerance());
        CHECK(std::isfinite(e.estimate()));
    }
}

TEST_CASE("adaptive_quad is order preserving")
{
    const double tol = 1e-12;
    auto f = [](double x) { return std::exp(-x) * std::cos(x) * std::cos(x); };
    auto g = [](double x) { return std::exp(-x); };
    CHECK(adaptive_quad(f, 0.0, 5.0).value <= adaptive_quad(g, 0.0, 5.0).value + 2.0 * tol);
}

TEST_CASE("default tolerance honours the environment override")
{
    setenv("NLDIFF_QUAD_TOL", "1e-9", 1);
    CHECK(default_quadrature_options().abs_tol == doctest::Approx(1e-9));
    setenv("NLDIFF_QUAD_TOL", "garbage", 1);
    CHECK(default_quadrature_options().abs_tol == doctest::Approx(1e-12));
    unsetenv("NLDIFF_QUAD_TOL");
    CHECK(default_quadrature_options().abs_tol == doctest::Approx(1e-12));
}

TEST_CASE("exp_int frozen high-precision values")
{
    CHECK(rel(exp_int(2.0, 1.0), 0.148495506775922047918) <= 1e-13);
    CHECK(rel(exp_int(2.5, 0.3), 0.367862417538404486558) <= 1e-12);
    CHECK(rel(exp_int(1.0, 1e-3), 6.33153936413614933200) <= 1e-12);
    CHECK(rel(exp_int(8.0, 50.0), 3.33313068627775626995e-24) <= 1e-12);
    CHECK(rel(exp_int(3.7, 7.0), 8.77497319298589136000e-5) <= 1e-12);
}

TEST_CASE("exp_int E_2(1) against the quadrature oracle")
{
    CHECK(rel(exp_int(2.0, 1.0), exp_int_oracle(2.0, 1.0)) <= 1e-13);
}

TEST_CASE("exp_int recurrence and bound")
{
    const double p = 2.0, x = 0.7;
    CHECK(std::abs(p * exp_int(p + 1.0, x) + x * exp_int(p, x) - std::exp(-x)) <= 1e-11);
    CHECK(exp_int(2.0, 5.0) < std::exp(-5.0) / 5.0);
}

TEST_CASE("exp_int matches quadrature across the supported range")
{
    for (double p : {1.0, 1.02, 1.5, 1.98, 2.0, 2.9, 3.0, 3.05, 4.0, 4.93, 5.5, 8.0})
    {
        for (double x : {1e-3, 0.01, 0.1, 0.5, 0.99, 1.0, 1.01, 2.0, 7.5, 20.0, 50.0})
        {
            CAPTURE(p);
            CAPTURE(x);
            const double oracle = exp_int_oracle(p, x);
            CHECK(rel(exp_int(p, x), oracle) <= 1e-12);
            CHECK(rel(exp_int_scaled(p, x), std::exp(x) * oracle) <= 1e-12);
            // recurrence holds for non-integer orders too
            CHECK(std::abs(p * exp_int(p + 1.0, x) + x * exp_int(p, x) - std::exp(-x)) <= 1e-12 * std::exp(-x) + 1e-15);
        }
    }
}

TEST_CASE("exp_int is strictly decreasing in p and x")
{
    for (double p : {1.0, 2.0, 3.0})
    {
        CHECK(exp_int(p, 0.1) > exp_int(p, 1.0));
        CHECK(exp_int(p, 1.0) > exp_int(p, 10.0));
    }
    for (double x : {0.1, 1.0, 10.0})
    {
        CHECK(exp_int(1.0, x) > exp_int(2.0, x));
        CHECK(exp_int(2.0, x) > exp_int(3.0, x));
    }
}

TEST_CASE("exp_int scaled survives where E_p underflows")
{
    const double big = 800.0;
    CHECK(exp_int(2.0, big) == 0.0);
    // e^x E_p(x) ~ 1/x (1 - p/x + p(p+1)/x^2)
    const double asym = (1.0 - 2.0 / big + 6.0 / (big * big)) / big;
    CHECK(rel(exp_int_scaled(2.0, big), asym) <= 1e-7);
}

TEST_CASE("exp_int domain errors")
{
    CHECK_THROWS_AS(exp_int(2.0, 0.0), DomainError);
    CHECK_THROWS_AS(exp_int(2.0, -1.0), DomainError);
    CHECK_THROWS_AS(exp_int(0.0, 1.0), DomainError);
}

TEST_CASE("t_minus_atan keeps relative accuracy for small t")
{
    for (double t : {1e-8, 1e-3, 0.05, 0.1, 0.1999, 0.2, 0.5, 3.0})
    {
        // series t^3/3 - t^5/5 + ... summed to convergence for the small arguments
        double series = 0.0, term = t * t * t;
        for (int k = 0; k < 60 && t < 0.3; ++k, term *= -t * t)
            series += term / (2 * k + 3);
        const double expect = t < 0.3 ? series : t - std::atan(t);
        CHECK(rel(t_minus_atan(t), expect) <= 1e-14);
    }
    CHECK(t_minus_atan(-0.01) == doctest::Approx(-t_minus_atan(0.01)));
}
