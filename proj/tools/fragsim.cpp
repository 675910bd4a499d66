#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fragsim/analytics.hpp"
#include "fragsim/fragmentation.hpp"
#include "fragsim/harness.hpp"
#include "fragsim/io.hpp"
#include "fragsim/paths.hpp"

using namespace fragsim;

namespace {

void print_checks(const ExperimentReport& r) {
    for (const auto& c : r.checks) {
        std::printf("%s %-44s", c.pass ? "PASS" : "FAIL", c.name.c_str());
        if (!std::isnan(c.t)) std::printf(" t=%-8g", c.t);
        std::printf(" estimate=%.6g", c.estimate);
        if (c.std_error > 0.0) std::printf(" se=%.3g", c.std_error);
        if (c.rule == Rule::range)
            std::printf(" range=[%.6g, %.6g]", c.lo, c.hi);
        else
            std::printf(" target=%.6g tol=%.3g (%s)", c.target, c.tolerance, to_string(c.rule));
        std::printf("\n");
    }
    for (const auto& w : r.warnings) std::printf("warning: %s\n", w.c_str());
    std::printf("%zu checks, %s, %.2f s\n", r.checks.size(), r.all_pass() ? "all pass" : "some failed", r.wall_time_s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fragmentation of random trees near the extinction time"};
    app.require_subcommand(1);

    auto* sample = app.add_subcommand("sample", "Sample a normalized excursion and write it as CSV + JSON");
    ExcursionSpec spec;
    std::uint64_t seed = 1;
    std::string out;
    sample->add_option("--beta", spec.beta, "Stable index in (1,2]")->default_val(2.0);
    sample->add_option("--grid", spec.grid_n, "Grid cells")->default_val(4096);
    sample->add_option("--seed", seed, "Seed")->default_val(1);
    sample->add_option("--out", out, "Output CSV")->required();

    auto* fragment = app.add_subcommand("fragment", "Snapshots {path > level} of a stored path");
    std::string path_file;
    std::vector<double> levels;
    fragment->add_option("--path", path_file, "Path CSV written by sample")->required();
    fragment->add_option("--levels", levels, "Levels, comma separated")->delimiter(',')->required();
    fragment->add_option("--out", out, "Output JSON (stdout if omitted)");

    auto* experiment = app.add_subcommand("experiment", "Run a Monte-Carlo experiment");
    ExperimentConfig config;
    std::string name;
    experiment->add_option("name", name, "extinction | last_fragment | total_mass | log_asymptotics | validation")
        ->required();
    experiment->add_option("--beta", config.beta, "Stable index in (1,2]")->default_val(2.0);
    experiment->add_option("--trials", config.trials, "Trials")->default_val(1000);
    experiment->add_option("--t", config.t_list, "Descending depths below the maximum")->delimiter(',');
    experiment->add_option("--seed", config.seed, "Seed")->default_val(1);
    experiment->add_option("--out", config.out_path, "Report JSON");
    experiment->add_option("--grid", config.grid_n, "Grid cells (0: from min t)")->default_val(0);
    experiment->add_option("--lambda", config.lambdas, "Laplace arguments")->delimiter(',');
    experiment->add_option("--ks-threshold", config.ks_threshold, "KS threshold (0: default)");
    experiment->add_option("--reference-grid", config.reference_grid, "Cells per side of the limit reference");
    experiment->add_option("--workers", config.workers, "Threads")->default_val(1);
    experiment->add_flag("--raw", config.raw, "Keep per-trial values, also written as <out>.csv");

    auto* phi = app.add_subcommand("phi-solve", "Solve the fixed-point equation for E exp(-lambda eta(1))");
    double alpha = -0.4, lambda_max = 10.0, tol = 1e-9;
    int points = 64;
    phi->add_option("--alpha", alpha, "alpha in (-1/2, 0)")->default_val(-0.4);
    phi->add_option("--lambda-max", lambda_max, "Largest lambda")->default_val(10.0);
    phi->add_option("--grid-points", points, "Uniform grid points on [0, lambda-max]")->default_val(64);
    phi->add_option("--tol", tol, "Residual tolerance")->default_val(1e-9);
    phi->add_option("--out", out, "Output CSV (stdout if omitted)");

    auto* verify = app.add_subcommand("verify", "Closed-form and metric consistency checks");
    std::string suite = "all";
    verify->add_option("--suite", suite, "all | analytics | metrics")->default_val("all");
    verify->add_option("--seed", seed, "Seed")->default_val(1);
    verify->add_option("--out", out, "Report JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sample) {
            spec.seed = Seed{seed, 0, 0};
            write_path(sample_stable_excursion(spec), out);
            return 0;
        }
        if (*fragment) {
            const auto path = read_path(path_file);
            Json snaps = Json::array();
            for (double level : levels) snaps.push_back(snapshot_json(level, level_set(path, level)));
            if (out.empty())
                std::cout << snaps.dump(2) << "\n";
            else
                write_text(out, snaps.dump(2) + "\n");
            return 0;
        }
        if (*experiment) {
            config.experiment = experiment_from_string(name);
            const auto report = run_experiment(config);
            print_checks(report);
            return report.all_pass() ? 0 : 1;
        }
        if (*phi) {
            if (points < 2) throw std::invalid_argument("phi-solve: need at least 2 grid points");
            std::vector<double> grid;
            for (int i = 0; i < points; ++i) grid.push_back(lambda_max * i / (points - 1));
            const auto table = solve_phi_fixed_point(alpha, grid, tol, 1000);
            if (out.empty()) {
                std::printf("lambda,phi\n");
                for (std::size_t i = 0; i < grid.size(); ++i) std::printf("%.17g,%.17g\n", grid[i], table.values[i]);
            } else {
                write_phi_table(table, out);
            }
            std::fprintf(stderr, "residual %.3g after %d iterations\n", table.residual, table.iterations);
            return 0;
        }
        if (*verify) {
            ExperimentConfig v;
            v.experiment = ExperimentKind::validation;
            v.suite = suite;
            v.seed = seed;
            v.out_path = out;
            const auto report = run_validation_suite(v);
            print_checks(report);
            return report.all_pass() ? 0 : 1;
        }
    } catch (const PhiNonConvergence& e) {
        std::fprintf(stderr, "error: %s (residual %.3g)\n", e.what(), e.residual);
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
