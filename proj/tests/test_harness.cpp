#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "nldiff/harness.hpp"

using namespace nldiff;

namespace
{
    // L*u(x) = int (u(x) - u(x - y)) nu(y) dy by brute-force quadrature.
    double apply_operator(const Kernel &k, const RealFunction &u, double x, std::vector<double> kinks = {})
    {
        QuadratureOptions opts;
        opts.abs_tol = 1e-13;
        opts.rel_tol = 1e-12;
        const double R = 60.0;
        std::vector<double> pts{-R, 0.0, R};
        for (double c : kinks)
            pts.push_back(x - c); // u(x - y) breaks where x - y = c
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        auto integrand = [&](double y) { return (u(x) - u(x - y)) * k(y); };
        double v = adaptive_quad_panels(integrand, pts, opts).value;
        const ExponentialDecay tail{k.decay().rate, k.decay().constant * 4.0 * (std::abs(u(x)) + 1.0)};
        v += adaptive_quad_to_infinity(integrand, R, tail, opts).value;
        v += adaptive_quad_from_neg_infinity(integrand, -R, tail, opts).value;
        return v;
    }
} // namespace

TEST_CASE("registry contents")
{
    const auto &reg = registry();
    std::set<std::string> ids;
    for (const auto &p : reg)
    {
        CHECK(ids.insert(p.id).second);
        CHECK(static_cast<bool>(p.exact_solution));
        CHECK(static_cast<bool>(p.make_spec));
    }
    for (const char *id : {"dirichlet-sech", "realline-algebraic", "neumann-discontinuous", "dirichlet-mixed-kernel",
                           "compare-sech-realline", "compare-sech-dirichlet0", "compare-sech-neumann0",
                           "compare-algebraic-realline", "compare-algebraic-dirichlet0", "compare-algebraic-neumann0"})
        CHECK(ids.count(id) == 1);
    CHECK_THROWS_AS(find_problem("nope"), ParameterError);

    CHECK(find_problem("dirichlet-sech").exact_solution(0.7) == doctest::Approx(1.0 / std::cosh(0.7)));
    CHECK(find_problem("dirichlet-sech").expected_order == 2.0);
    CHECK(find_problem("neumann-discontinuous").expected_order == 1.0);

    const auto &u = find_problem("realline-algebraic").exact_solution;
    for (double x : {1e3, -1e3})
        CHECK(u(x) * 2.0 * x * x == doctest::Approx(1.0).epsilon(1e-3));

    const auto &un = find_problem("neumann-discontinuous").exact_solution;
    for (double x : {-0.9, 0.0, 0.4})
        CHECK(un(x) == doctest::Approx(x * x - (x * x - 3) * (x - 1) * (x + 1) / 12.0 - 5.0 / 6.0));
    CHECK(un(2.0) == doctest::Approx(1.0 / 16 - 1.0 / 24));
}

TEST_CASE("exact solutions solve their equations")
{
    const Kernel laplace = laplace_kernel();
    const Kernel mixed = mixed_sign_kernel();
    for (double x : {0.0, 0.3, -1.7, 4.0})
    {
        CAPTURE(x);
        CHECK(apply_operator(laplace, problems::sech, x) ==
              doctest::Approx(problems::laplace_sech_forcing(x)).epsilon(1e-9));
        CHECK(apply_operator(mixed, problems::sech, x) ==
              doctest::Approx(problems::mixed_sech_forcing(x)).epsilon(1e-9));
        auto ua = [](double s) { return problems::algebraic_solution(s); };
        CHECK(std::abs(apply_operator(laplace, ua, x) - problems::algebraic_forcing(x)) <= 1e-6);
    }
    for (double x : {0.0, 0.5, -0.8, 1.5, -3.0})
    {
        CAPTURE(x);
        const double Lu = apply_operator(laplace, problems::discontinuous_solution, x, {-1.0, 1.0});
        CHECK(std::abs(Lu - problems::discontinuous_forcing(x)) <= 1e-6);
    }
}

TEST_CASE("published candidates are cross-validated at registration")
{
    const auto &warnings = registry_warnings();
    bool mixed_A = false;
    for (const auto &w : warnings)
    {
        if (w.find("dirichlet-mixed-kernel") == 0 && w.find("tail mass") != std::string::npos)
            mixed_A = true;
        CHECK(w.find("dirichlet-sech:") != 0);
    }
    CHECK(mixed_A);

    // The kernel registered for the experiment carries the integrated tail mass.
    const auto spec = find_problem("dirichlet-mixed-kernel").make_spec(10.0);
    for (double LW : {2.0, 20.0})
        CHECK(tail_mass(spec.kernel, LW) ==
              doctest::Approx(3.0 * std::exp(-LW) - 2.0 * std::exp(-2.0 * LW)).epsilon(1e-12));
    CHECK(std::abs(problems::mixed_printed_tail_mass(2.0) - tail_mass(spec.kernel, 2.0)) > 0.1);
}

TEST_CASE("compatibility check")
{
    const auto &p = find_problem("realline-algebraic");
    const auto ok = compatibility_check(p.forcing, *p.forcing_decay, 1e-8);
    CHECK(ok.passed);
    CHECK(std::abs(ok.mean) <= 1e-8);
    CHECK(std::abs(ok.first_moment) <= 1e-8);

    for (const auto &r : registry())
    {
        if (!r.forcing_decay)
            continue;
        CAPTURE(r.id);
        CHECK(compatibility_check(r.forcing, *r.forcing_decay, 1e-8, r.forcing_breakpoints).passed);
    }

    auto gauss = [](double x) { return std::exp(-x * x); };
    const auto g = compatibility_check(gauss, ExponentialDecay{1.0, std::exp(0.25)}, 1e-8);
    CHECK_FALSE(g.passed);
    CHECK(g.mean == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-10));

    auto odd = [](double x) { return x * std::exp(-x * x); };
    const auto o = compatibility_check(odd, ExponentialDecay{1.0, 1.0}, 1e-8);
    CHECK(std::abs(o.mean) <= 1e-12);
    CHECK(o.first_moment == doctest::Approx(0.5 * std::sqrt(std::numbers::pi)).epsilon(1e-10));
    CHECK_FALSE(o.passed);

    CHECK_THROWS_AS(compatibility_check(gauss, AlgebraicDecay{2.0, 1.0, 1.0}, 1e-8), ParameterError);
}

TEST_CASE("shifted forcings fail the compatibility check")
{
    // Additive offset: nonzero mass.
    auto offset = [](double x) { return problems::algebraic_forcing(x) + 0.01 / (1.0 + x * x); };
    const auto a = compatibility_check(offset, AlgebraicDecay{2.5, 4.0, 1.0}, 1e-8);
    CHECK_FALSE(a.passed);
    CHECK(a.mean == doctest::Approx(0.01 * std::numbers::pi).epsilon(1e-8));

    // Centre lobe moved off the origin: mass survives, first moment does not.
    auto shifted = [](double x) {
        return 1.0 / (1.0 + (x - 0.5) * (x - 0.5)) - 0.5 / (1.0 + (x - 1) * (x - 1)) - 0.5 / (1.0 + (x + 1) * (x + 1));
    };
    const auto s = compatibility_check(shifted, AlgebraicDecay{3.0, 4.0, 4.0}, 1e-8);
    CHECK_FALSE(s.passed);
    CHECK(std::abs(s.mean) <= 1e-8);
    CHECK(s.first_moment == doctest::Approx(0.5 * std::numbers::pi).epsilon(1e-6));
}

TEST_CASE("fit_order")
{
    const std::vector<double> hs{0.4, 0.2, 0.1, 0.05};
    std::vector<double> errs;
    for (double h : hs)
        errs.push_back(3.0 * h * h);
    CHECK(fit_order(hs, errs, 1.0) == doctest::Approx(2.0).epsilon(1e-12));

    // noise-floor entries are excluded
    // fewer than three usable points gives no order
    errs[2] = errs[3] = 1e-17;
    CHECK(std::isnan(fit_order(hs, errs, 1.0)));
    errs[2] = 3.0 * 0.1 * 0.1;
    CHECK(fit_order(hs, errs, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
    errs.push_back(1e-17);
    std::vector<double> hs5 = hs;
    hs5.push_back(0.025);
    errs[3] = 3.0 * 0.05 * 0.05;
    CHECK(fit_order(hs5, errs, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("run_convergence on the sech Dirichlet problem")
{
    const std::vector<double> Ls{10.0};
    const std::vector<int> Ms{800, 100, 400, 200};
    const auto report = run_convergence("dirichlet-sech", Ls, Ms);
    REQUIRE(report.rows.size() == 4);
    for (std::size_t k = 1; k < report.rows.size(); ++k)
        CHECK(report.rows[k].h < report.rows[k - 1].h);
    const double order = report.fitted_order.at(10.0);
    CHECK(order >= 1.7);
    CHECK(order <= 2.3);
    for (const auto &r : report.rows)
    {
        CHECK_FALSE(r.failed);
        CHECK(r.fitted_order == order);
        CHECK(r.runtime_ms >= 0.0);
    }

    const std::vector<int> two{100, 200};
    CHECK_THROWS_AS(run_convergence("dirichlet-sech", Ls, two), ParameterError);
}

TEST_CASE("run_convergence on the Neumann problem is first order")
{
    const std::vector<double> Ls{16.0};
    const std::vector<double> hs{0.2, 0.1, 0.05};
    const auto report = run_convergence_h("neumann-discontinuous", Ls, hs);
    const double order = report.fitted_order.at(16.0);
    CHECK(order >= 0.8);
    CHECK(order <= 1.2);
}

TEST_CASE("failed cells become rows")
{
    const std::vector<double> Ls{5.0};
    const std::vector<int> Ms{20, 41, 40, 80};
    const auto report = run_convergence("dirichlet-sech", Ls, Ms);
    int failed = 0;
    for (const auto &r : report.rows)
        if (r.failed)
        {
            ++failed;
            CHECK(r.M == 41);
            CHECK_FALSE(r.failure.empty());
            CHECK(std::isnan(r.linf_error));
        }
    CHECK(failed == 1);
    CHECK(std::isfinite(report.fitted_order.at(5.0)));
}

TEST_CASE("CSV emission")
{
    ConvergenceReport one;
    one.rows.push_back({"dirichlet-sech", 10.0, 100, 0.2, 0.0021253901100164452, 1.81, 0.4, false, ""});
    one.fitted_order[10.0] = 1.81;
    std::ostringstream out;
    emit_csv(one, out);
    const std::string text = out.str();
    CHECK(text.substr(0, text.find('\n')) == "problem,L,M,h,linf_error,fitted_order,runtime_ms");
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);

    ConvergenceReport empty;
    std::ostringstream sink;
    CHECK_THROWS_AS(emit_csv(empty, sink), ParameterError);
    CHECK_THROWS_AS(emit_csv(one, std::string("/nonexistent-dir/report.csv")), Error);
}

TEST_CASE("CSV round trip is exact")
{
    const std::vector<double> Ls{5.0, 7.5};
    const std::vector<int> Ms{20, 40, 80};
    const auto report = run_convergence("dirichlet-mixed-kernel", Ls, Ms);
    std::stringstream buf;
    emit_csv(report, buf);
    const auto back = parse_csv(buf);
    REQUIRE(back.rows.size() == report.rows.size());
    for (std::size_t k = 0; k < back.rows.size(); ++k)
    {
        const auto &a = report.rows[k];
        const auto &b = back.rows[k];
        CHECK(a.problem == b.problem);
        CHECK(a.L == b.L);
        CHECK(a.M == b.M);
        CHECK(a.h == b.h);
        CHECK(a.linf_error == b.linf_error);
        CHECK(a.fitted_order == b.fitted_order);
        CHECK(a.runtime_ms == b.runtime_ms);
    }
    CHECK(back.fitted_order == report.fitted_order);
}
