#include "nldiff/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "nldiff/errors.hpp"

namespace nldiff
{
    namespace
    {
        struct Moments
        {
            double mean = 0.0;
            double first = 0.0;
        };

        // Sorted, deduplicated breakpoints inside [-T, T] plus the endpoints.
        std::vector<double> core_points(std::span<const double> breakpoints, double T)
        {
            std::vector<double> pts{-T, 0.0, T};
            for (double b : breakpoints)
                if (std::abs(b) < T)
                    pts.push_back(b);
            std::sort(pts.begin(), pts.end());
            pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
            return pts;
        }

        double core_extent(std::span<const double> breakpoints, double start)
        {
            double T = start;
            for (double b : breakpoints)
                T = std::max(T, std::abs(b) + 1.0);
            return T;
        }

        Moments integrate_core(const RealFunction &f, const std::vector<double> &pts, const QuadratureOptions &opts)
        {
            return {adaptive_quad_panels(f, pts, opts).value,
                    adaptive_quad_panels([&](double x) { return x * f(x); }, pts, opts).value};
        }

        Moments moments_exponential(const RealFunction &f, const ExponentialDecay &d,
                                    std::span<const double> breakpoints, const QuadratureOptions &opts)
        {
            const double T = core_extent(breakpoints, 1.0 / d.rate);
            Moments m = integrate_core(f, core_points(breakpoints, T), opts);

            // |x| e^{-rate |x|} <= 2/(e rate) e^{-rate |x| / 2}
            const ExponentialDecay first_cert{0.5 * d.rate, d.constant * 2.0 / (std::numbers::e * d.rate)};
            m.mean += adaptive_quad_to_infinity(f, T, d, opts).value;
            m.mean += adaptive_quad_from_neg_infinity(f, -T, d, opts).value;
            m.first += adaptive_quad_to_infinity([&](double x) { return x * f(x); }, T, first_cert, opts).value;
            m.first += adaptive_quad_from_neg_infinity([&](double x) { return x * f(x); }, -T, first_cert, opts).value;
            return m;
        }

        Moments moments_algebraic(const RealFunction &f, const AlgebraicDecay &d, std::span<const double> breakpoints,
                                  const QuadratureOptions &opts)
        {
            if (!(d.exponent > 2.0))
                throw ParameterError("compatibility_check: the first moment needs algebraic decay faster than x^-2");
            const double T = core_extent(breakpoints, std::max(d.start, 1.0));
            Moments m = integrate_core(f, core_points(breakpoints, T), opts);

            // x = T + t/(1-t) maps [0, 1) onto [T, inf); the Kronrod nodes never touch t = 1.
            auto tail = [&](double sign, int power) {
                auto mapped = [&](double t) {
                    const double s = 1.0 - t;
                    const double x = sign * (T + t / s);
                    return (power == 0 ? 1.0 : x) * f(x) / (s * s);
                };
                return adaptive_quad(mapped, 0.0, 1.0, opts).value;
            };
            m.mean += tail(1.0, 0) + tail(-1.0, 0);
            m.first += tail(1.0, 1) + tail(-1.0, 1);
            return m;
        }
    } // namespace

    CompatibilityResult compatibility_check(const RealFunction &f, const DecayCertificate &certificate, double tol,
                                            std::span<const double> breakpoints)
    {
        if (!(tol > 0.0))
            throw ParameterError("compatibility_check: requires tol > 0");
        QuadratureOptions opts;
        opts.abs_tol = 1e-2 * tol;
        opts.rel_tol = 1e-12;

        const Moments m = std::visit(
            [&](const auto &cert) {
                using T = std::decay_t<decltype(cert)>;
                if constexpr (std::is_same_v<T, ExponentialDecay>)
                    return moments_exponential(f, cert, breakpoints, opts);
                else
                    return moments_algebraic(f, cert, breakpoints, opts);
            },
            certificate);

        CompatibilityResult out;
        out.mean = m.mean;
        out.first_moment = m.first;
        out.passed = std::abs(m.mean) <= tol && std::abs(m.first) <= tol;
        return out;
    }

    double fit_order(std::span<const double> hs, std::span<const double> errors, double scale)
    {
        if (hs.size() != errors.size())
            throw ParameterError("fit_order: h and error lists differ in length");
        const double floor = 100.0 * std::numeric_limits<double>::epsilon() * scale;
        std::vector<double> lx, ly;
        for (std::size_t k = 0; k < hs.size(); ++k)
        {
            if (std::isfinite(errors[k]) && errors[k] > floor && hs[k] > 0.0)
            {
                lx.push_back(std::log(hs[k]));
                ly.push_back(std::log(errors[k]));
            }
        }
        if (lx.size() < 3)
            return std::numeric_limits<double>::quiet_NaN();
        const double n = static_cast<double>(lx.size());
        double mx = 0.0, my = 0.0;
        for (std::size_t k = 0; k < lx.size(); ++k)
        {
            mx += lx[k];
            my += ly[k];
        }
        mx /= n;
        my /= n;
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t k = 0; k < lx.size(); ++k)
        {
            sxy += (lx[k] - mx) * (ly[k] - my);
            sxx += (lx[k] - mx) * (lx[k] - mx);
        }
        return sxy / sxx;
    }

    namespace
    {
        struct Cell
        {
            double L;
            int M;
        };

        struct CellResult
        {
            ConvergenceRow row;
            double scale = 0.0; // |u|_inf on the nodes
        };

        CellResult run_cell(const RegisteredProblem &problem, const Cell &cell)
        {
            CellResult out;
            auto &row = out.row;
            row.problem = problem.id;
            row.L = cell.L;
            row.M = cell.M;
            row.h = 2.0 * cell.L / cell.M;
            try
            {
                const ProblemSpec spec = problem.make_spec(cell.L);
                const Grid grid = build_grid(problem.domain_factor * cell.L, problem.domain_factor * cell.M);
                const WeightSet weights = compute_weights(spec.kernel, grid);

                const auto start = std::chrono::steady_clock::now();
                const DiscreteSystem system = assemble(spec, grid, weights);
                const Solution sol = solve(system);
                const auto stop = std::chrono::steady_clock::now();

                row.h = grid.h;
                row.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
                row.linf_error = error_norms(sol, problem.exact_solution).linf;
                for (int k = sol.first_index; k <= sol.last_index(); ++k)
                    out.scale = std::max(out.scale, std::abs(problem.exact_solution(grid.node(k))));
            }
            catch (const std::exception &e)
            {
                row.failed = true;
                row.failure = e.what();
                row.linf_error = std::numeric_limits<double>::quiet_NaN();
            }
            return out;
        }

        ConvergenceReport sweep(const RegisteredProblem &problem, const std::vector<Cell> &cells,
                                const SweepOptions &options)
        {
            std::vector<CellResult> results(cells.size());
            unsigned workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
            workers = std::min<unsigned>(workers, static_cast<unsigned>(cells.size()));

            std::atomic<std::size_t> next{0};
            auto work = [&] {
                for (std::size_t k = next++; k < cells.size(); k = next++)
                    results[k] = run_cell(problem, cells[k]);
            };
            std::vector<std::thread> pool;
            for (unsigned w = 1; w < workers; ++w)
                pool.emplace_back(work);
            work();
            for (auto &t : pool)
                t.join();

            std::sort(results.begin(), results.end(), [](const CellResult &a, const CellResult &b) {
                if (a.row.L != b.row.L)
                    return a.row.L < b.row.L;
                return a.row.h > b.row.h;
            });

            ConvergenceReport report;
            for (std::size_t k = 0; k < results.size();)
            {
                const double L = results[k].row.L;
                std::size_t end = k;
                std::vector<double> hs, errs;
                double scale = 0.0;
                for (; end < results.size() && results[end].row.L == L; ++end)
                {
                    if (results[end].row.failed)
                        continue;
                    hs.push_back(results[end].row.h);
                    errs.push_back(results[end].row.linf_error);
                    scale = std::max(scale, results[end].scale);
                }
                const double order = fit_order(hs, errs, scale);
                report.fitted_order[L] = order;
                for (; k < end; ++k)
                {
                    results[k].row.fitted_order = order;
                    report.rows.push_back(std::move(results[k].row));
                }
            }
            return report;
        }
    } // namespace

    ConvergenceReport run_convergence(const std::string &problem_id, std::span<const double> Ls,
                                      std::span<const int> Ms, const SweepOptions &options)
    {
        const auto &problem = find_problem(problem_id);
        if (!problem.exact_solution)
            throw ParameterError("run_convergence: problem has no exact solution");
        if (Ls.empty())
            throw ParameterError("run_convergence: need at least one L");
        if (Ms.size() < 3)
            throw ParameterError("run_convergence: order fitting needs at least 3 values of M");
        std::vector<Cell> cells;
        for (double L : Ls)
            for (int M : Ms)
                cells.push_back({L, M});
        return sweep(problem, cells, options);
    }

    ConvergenceReport run_convergence_h(const std::string &problem_id, std::span<const double> Ls,
                                        std::span<const double> hs, const SweepOptions &options)
    {
        const auto &problem = find_problem(problem_id);
        if (!problem.exact_solution)
            throw ParameterError("run_convergence: problem has no exact solution");
        if (Ls.empty())
            throw ParameterError("run_convergence: need at least one L");
        if (hs.size() < 3)
            throw ParameterError("run_convergence: order fitting needs at least 3 values of h");
        std::vector<Cell> cells;
        for (double L : Ls)
        {
            for (double h : hs)
            {
                if (!(h > 0.0))
                    throw ParameterError("run_convergence: h must be positive");
                int M = static_cast<int>(std::lround(2.0 * L / h));
                M += M % 2;
                cells.push_back({L, M});
            }
        }
        return sweep(problem, cells, options);
    }

    void emit_csv(const ConvergenceReport &report, std::ostream &out)
    {
        if (report.rows.empty())
            throw ParameterError("emit_csv: empty report");
        out << csv_header << '\n';
        out << std::setprecision(17);
        for (const auto &r : report.rows)
            out << r.problem << ',' << r.L << ',' << r.M << ',' << r.h << ',' << r.linf_error << ',' << r.fitted_order
                << ',' << r.runtime_ms << '\n';
        if (!out)
            throw Error("emit_csv: write failed");
    }

    void emit_csv(const ConvergenceReport &report, const std::string &path)
    {
        std::ofstream file(path);
        if (!file)
            throw Error("emit_csv: cannot open " + path);
        emit_csv(report, file);
        file.close();
        if (!file)
            throw Error("emit_csv: write failed for " + path);
    }

    ConvergenceReport parse_csv(std::istream &in)
    {
        std::string line;
        if (!std::getline(in, line) || line != csv_header)
            throw ParameterError("parse_csv: unexpected header");
        ConvergenceReport report;
        while (std::getline(in, line))
        {
            if (line.empty())
                continue;
            std::vector<std::string> fields;
            std::stringstream ss(line);
            for (std::string field; std::getline(ss, field, ',');)
                fields.push_back(field);
            if (fields.size() != 7)
                throw ParameterError("parse_csv: expected 7 fields in '" + line + "'");
            ConvergenceRow r;
            r.problem = fields[0];
            r.L = std::stod(fields[1]);
            r.M = std::stoi(fields[2]);
            r.h = std::stod(fields[3]);
            r.linf_error = std::stod(fields[4]);
            r.fitted_order = std::stod(fields[5]);
            r.runtime_ms = std::stod(fields[6]);
            r.failed = std::isnan(r.linf_error);
            report.fitted_order[r.L] = r.fitted_order;
            report.rows.push_back(std::move(r));
        }
        return report;
    }
} // namespace nldiff
