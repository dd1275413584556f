// nldiff: solve, sweep and diagnose the built-in nonlocal diffusion problems.
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nldiff/errors.hpp"
#include "nldiff/harness.hpp"

namespace
{
    void print_warnings(const std::string &id)
    {
        for (const auto &w : nldiff::registry_warnings())
            if (w.rfind(id + ":", 0) == 0)
                std::cerr << "warning: " << w << '\n';
    }

    int cmd_solve(const std::string &id, double L, int M, const std::string &out_path)
    {
        const auto &problem = nldiff::find_problem(id);
        print_warnings(id);
        const auto spec = problem.make_spec(L);
        const auto grid = nldiff::build_grid(problem.domain_factor * L, problem.domain_factor * M);
        const auto weights = nldiff::compute_weights(spec.kernel, grid);
        const auto sol = nldiff::solve(nldiff::assemble(spec, grid, weights));

        std::ofstream file;
        if (!out_path.empty())
        {
            file.open(out_path);
            if (!file)
                throw nldiff::Error("cannot open " + out_path);
        }
        std::ostream &out = out_path.empty() ? std::cout : file;
        out << "x,u\n" << std::setprecision(17);
        for (int k = sol.first_index; k <= sol.last_index(); ++k)
            out << grid.node(k) << ',' << sol.at(k) << '\n';
        return out ? 0 : 1;
    }

    int cmd_converge(const std::string &id, const std::vector<double> &Ls, const std::vector<int> &Ms,
                     const std::string &out_path, unsigned workers)
    {
        print_warnings(id);
        const auto report = nldiff::run_convergence(id, Ls, Ms, {workers});
        for (const auto &row : report.rows)
            if (row.failed)
                std::cerr << "failed: L=" << row.L << " M=" << row.M << ": " << row.failure << '\n';
        if (out_path.empty())
            nldiff::emit_csv(report, std::cout);
        else
            nldiff::emit_csv(report, out_path);
        return 0;
    }

    int cmd_check(const std::string &id)
    {
        const auto &problem = nldiff::find_problem(id);
        print_warnings(id);
        bool ok = true;
        std::cout << std::setprecision(17);

        if (problem.forcing_decay)
        {
            const auto c = nldiff::compatibility_check(problem.forcing, *problem.forcing_decay, 1e-8,
                                                       problem.forcing_breakpoints);
            std::cout << "compatibility.mean=" << c.mean << '\n'
                      << "compatibility.first_moment=" << c.first_moment << '\n'
                      << "compatibility.passed=" << (c.passed ? "true" : "false") << '\n';
            ok = ok && c.passed;
        }
        else
        {
            std::cout << "compatibility=not-applicable\n";
        }

        const auto spec = problem.make_spec(10.0);
        const std::vector<double> Ls{2.0, 5.0, 10.0};
        const auto r = nldiff::validate_kernel(spec.kernel, Ls);
        std::cout << "kernel=" << spec.kernel.name() << '\n'
                  << "kernel.mass=" << r.mass << '\n'
                  << "kernel.first_moment=" << r.first_moment << '\n'
                  << "kernel.second_moment=" << r.second_moment << '\n'
                  << "kernel.fourth_moment=" << r.fourth_moment << '\n';
        for (const auto &[L, tail] : r.tail_positivity)
            std::cout << "kernel.tail[L=" << L << "]=" << tail << '\n';
        std::cout << "kernel.passed=" << (r.passed() ? "true" : "false") << '\n';
        ok = ok && r.passed();
        return ok ? 0 : 1;
    }

    int cmd_stability(const std::string &id, double L, int M)
    {
        const auto &problem = nldiff::find_problem(id);
        const auto spec = problem.make_spec(L);
        const auto grid = nldiff::build_grid(problem.domain_factor * L, problem.domain_factor * M);
        const auto weights = nldiff::compute_weights(spec.kernel, grid);
        const auto system = nldiff::assemble(spec, grid, weights);
        const auto report = nldiff::stability_report(system, spec.kernel, grid);

        double lambda_min = report.lambda.front();
        for (double l : report.lambda)
            lambda_min = std::min(lambda_min, l);
        std::cout << std::setprecision(17) << "problem=" << id << '\n'
                  << "kind=" << nldiff::to_string(system.kind) << '\n'
                  << "L=" << grid.L << '\n'
                  << "M=" << grid.M << '\n'
                  << "h=" << grid.h << '\n'
                  << "A=" << weights.A << '\n'
                  << "lambda_0=" << report.lambda.front() << '\n'
                  << "lambda_min=" << lambda_min << '\n'
                  << "lambda_min_bound=" << report.lambda_min_bound << '\n';
        if (report.min_eigenvalue)
            std::cout << "min_eigenvalue=" << *report.min_eigenvalue << '\n';
        if (report.z_inf_norm)
            std::cout << "z_inf_norm=" << *report.z_inf_norm << '\n';
        std::cout << "stable=" << (report.stable ? "true" : "false") << '\n';
        return report.stable ? 0 : 1;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Quadrature solver for 1-D nonlocal diffusion problems"};
    app.require_subcommand(1);

    std::string id;
    double L = 10.0;
    int M = 200;
    std::string out_path;
    std::vector<double> Ls;
    std::vector<int> Ms;
    unsigned workers = 0;

    auto *solve = app.add_subcommand("solve", "solve one problem and write x,u");
    solve->add_option("--problem", id, "problem id")->required();
    solve->add_option("--L", L, "domain half-width")->required();
    solve->add_option("--M", M, "number of grid intervals across the window (even)")->required();
    solve->add_option("--out", out_path, "output CSV (default: stdout)");

    auto *converge = app.add_subcommand("converge", "convergence sweep over L x M");
    converge->add_option("--problem", id, "problem id")->required();
    converge->add_option("--L", Ls, "half-widths, comma separated")->required()->delimiter(',');
    converge->add_option("--M", Ms, "grid sizes, comma separated")->required()->delimiter(',');
    converge->add_option("--out", out_path, "output CSV (default: stdout)");
    converge->add_option("--workers", workers, "concurrent sweep cells (0: all cores)");

    auto *check = app.add_subcommand("check", "compatibility and kernel validation");
    check->add_option("--problem", id, "problem id")->required();

    auto *stability = app.add_subcommand("stability", "stability diagnostics as key=value lines");
    stability->add_option("--problem", id, "problem id")->required();
    stability->add_option("--L", L, "domain half-width")->required();
    stability->add_option("--M", M, "number of grid intervals across the window (even)")->required();

    app.add_subcommand("list", "print the registered problem ids");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*solve)
            return cmd_solve(id, L, M, out_path);
        if (*converge)
            return cmd_converge(id, Ls, Ms, out_path, workers);
        if (*check)
            return cmd_check(id);
        if (*stability)
            return cmd_stability(id, L, M);
        for (const auto &p : nldiff::registry())
            std::cout << p.id << "  " << p.notes << '\n';
        return 0;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
