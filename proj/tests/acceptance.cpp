// Acceptance run: one PASS/FAIL line per criterion, then a determinism pass
// that repeats every criterion with a different worker count.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fragsim/analytics.hpp"
#include "fragsim/continuum.hpp"
#include "fragsim/harness.hpp"
#include "fragsim/io.hpp"
#include "fragsim/limits.hpp"
#include "fragsim/paths.hpp"
#include "fragsim/refine.hpp"
#include "fragsim/stats.hpp"

using namespace fragsim;

namespace {

constexpr double nan_t = std::numeric_limits<double>::quiet_NaN();

struct Outcome {
    // reports.front() holds the checks that decide the criterion; any further
    // reports are the full harness output it was drawn from.
    std::vector<ExperimentReport> reports;
    std::vector<std::string> notes;

    ExperimentReport& verdict() { return reports.front(); }
    bool pass() const { return !reports.front().checks.empty() && reports.front().all_pass(); }
    std::string canonical() const {
        std::string s;
        for (const auto& r : reports) s += canonical_report(r);
        return s;
    }
};

struct Context {
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::optional<ExperimentReport> analytics;

    const ExperimentReport& analytics_report() {
        if (!analytics) {
            ExperimentConfig v;
            v.experiment = ExperimentKind::validation;
            v.suite = "analytics";
            v.seed = seed;
            v.workers = workers;
            analytics = run_validation_suite(v);
            analytics->wall_time_s = 0.0;
        }
        return *analytics;
    }
};

Outcome start(const Context& ctx, const std::string& id) {
    Outcome o;
    ExperimentReport r;
    r.config.experiment = ExperimentKind::validation;
    r.config.suite = "acceptance " + id;
    r.config.seed = ctx.seed;
    r.config.trials = 0;
    r.config.t_list.clear();
    r.config.lambdas.clear();
    o.reports.push_back(std::move(r));
    return o;
}

ExperimentConfig harness_config(const Context& ctx, ExperimentKind kind, double beta, std::uint64_t trials,
                                std::vector<double> t_list, std::vector<double> lambdas = {1.0}) {
    ExperimentConfig c;
    c.experiment = kind;
    c.beta = beta;
    c.trials = trials;
    c.t_list = std::move(t_list);
    c.lambdas = std::move(lambdas);
    c.seed = ctx.seed;
    c.workers = ctx.workers;
    return c;
}

// Copies the harness checks whose name starts with prefix into the verdict.
void adopt(Outcome& o, ExperimentReport r, const std::vector<std::string>& prefixes) {
    r.wall_time_s = 0.0;
    for (const auto& c : r.checks)
        for (const auto& p : prefixes)
            if (c.name.rfind(p, 0) == 0) {
                o.verdict().checks.push_back(c);
                break;
            }
    for (const auto& w : r.warnings) o.notes.push_back(w);
    o.reports.push_back(std::move(r));
}

void adopt_from(Outcome& o, const ExperimentReport& r, const std::vector<std::string>& prefixes) {
    for (const auto& c : r.checks)
        for (const auto& p : prefixes)
            if (c.name.rfind(p, 0) == 0) {
                o.verdict().checks.push_back(c);
                break;
            }
}

MeanSe mean_of(const std::vector<double>& v) { return mean_se(v); }

// ---- criteria ----

Outcome c1_kennedy(Context& ctx) {
    auto o = start(ctx, "C1");
    const std::size_t n = 20000, grid = 1 << 14;
    std::vector<double> refined(n), sampled(n);
    parallel_for(n, ctx.workers, [&](std::size_t i) {
        const auto path = sample_brownian_excursion(grid, Seed{ctx.seed, 101, i});
        Rng rng(Seed{ctx.seed, 102, i});
        const auto ext = sample_bridge_extrema(path, rng);
        refined[i] = refined_extinction(path, ext).zeta > 0.8 ? 1.0 : 0.0;
        sampled[i] = path.values()[argmax_index(path)] > 0.8 ? 1.0 : 0.0;
    });
    const auto p = mean_of(refined), pg = mean_of(sampled);
    auto& v = o.verdict();
    v.statistics.push_back({"P(zeta>0.8)_grid_max", nan_t, pg.mean, pg.std_error, pg.n});
    v.checks.push_back(make_check("P(zeta>0.8)", nan_t, Rule::max_tol_3se, p.mean, p.std_error, p.n,
                                  kennedy_tail(0.8), 0.015));
    return o;
}

Outcome c2_phi_nu(Context& ctx) {
    auto o = start(ctx, "C2");
    adopt_from(o, ctx.analytics_report(), {"phi_nu_vs_closed_form"});
    return o;
}

Outcome c3_stable_phi(Context& ctx) {
    auto o = start(ctx, "C3");
    adopt_from(o, ctx.analytics_report(), {"stable_phi_mc"});
    return o;
}

// (sqrt(2 lambda) / sinh sqrt(2 lambda))^2: two independent Bes(3) first
// passages at 1.
double bessel_passage_laplace(double lambda) {
    const double s = std::sqrt(2.0 * lambda);
    const double one = s / std::sinh(s);
    return one * one;
}

Outcome c4_brownian_limit(Context& ctx) {
    auto o = start(ctx, "C4");
    const std::size_t n = 10000, grid = 1 << 14;
    std::vector<double> eta(n), lap(n);
    parallel_for(n, ctx.workers, [&](std::size_t i) {
        BrownianHInfinityOptions opts;
        opts.complete_level = 1.0;
        const auto h = sample_h_infinity_brownian(3.0, grid, Seed{ctx.seed, 103, i}, opts);
        Rng rng(Seed{ctx.seed, 104, i});
        const auto ext = sample_bridge_extrema(h.path, rng);
        const auto set = bridge_sublevel_set(h.path, ext, 1.0);
        const long k = set.component_of(0.0);
        eta[i] = k < 0 ? 0.0 : set.intervals[std::size_t(k)].length();
        lap[i] = std::exp(-eta[i]);
    });
    const auto m = mean_of(eta), l = mean_of(lap);
    auto& v = o.verdict();
    v.checks.push_back(make_check("mean_eta(1)", nan_t, Rule::max_tol_3se, m.mean, m.std_error, m.n, 2.0 / 3.0, 0.02));
    v.checks.push_back(make_check("laplace_eta(1)(1)", nan_t, Rule::max_tol_3se, l.mean, l.std_error, l.n,
                                  bessel_passage_laplace(1.0), 0.01));
    return o;
}

Outcome c5_last_fragment(Context& ctx) {
    auto o = start(ctx, "C5");
    adopt(o, run_last_fragment_experiment(harness_config(ctx, ExperimentKind::last_fragment, 2.0, 5000, {0.02})),
          {"ks_last_fragment_vs_size_biased", "laplace_F_star_over_t2(1"});
    return o;
}

Outcome c6_total_mass(Context& ctx) {
    auto o = start(ctx, "C6");
    adopt(o, run_total_mass_experiment(harness_config(ctx, ExperimentKind::total_mass, 2.0, 5000, {0.02})),
          {"laplace_mass(1"});
    return o;
}

Outcome c7_extinction(Context& ctx) {
    auto o = start(ctx, "C7");
    adopt(o, run_extinction_experiment(harness_config(ctx, ExperimentKind::extinction, 2.0, 5000, {0.02})),
          {"ks_F1_vs_limit"});
    adopt(o, run_extinction_experiment(harness_config(ctx, ExperimentKind::extinction, 1.5, 5000, {0.05, 0.02})),
          {"ks_F1_stability"});
    return o;
}

Outcome c8_self_similarity(Context& ctx) {
    auto o = start(ctx, "C8");
    const double beta = 1.5, m = 2.0, alpha = 1.0 / beta - 1.0;
    const std::size_t n = 5000;
    const StableExcursionBank bank(beta, 512, 4096, Seed{ctx.seed, 105, 0});
    std::vector<double> at_one(n), scaled(n);
    parallel_for(2 * n, ctx.workers, [&](std::size_t i) {
        const auto e = sample_stable_eta(beta, m, 1e-3, bank, Seed{ctx.seed, 106, i});
        if (i < n)
            at_one[i] = e.eta(1.0);
        else
            scaled[i - n] = std::pow(m, 1.0 / alpha) * e.eta(m);
    });
    const double ks = ks_two_sample(at_one, scaled);
    auto& v = o.verdict();
    v.statistics.push_back({"ks_critical_p0.001", nan_t, ks_critical(n, n, 0.001), 0.0, n});
    v.checks.push_back(make_check("ks_scaled_eta(2)_vs_eta(1)", nan_t, Rule::below, ks, 0.0, n, 0.06, 0.0));
    return o;
}

Outcome c9_log_asymptotics(Context& ctx) {
    auto o = start(ctx, "C9");
    const double t2 = std::pow(10.0, -2.5);
    auto bc = harness_config(ctx, ExperimentKind::log_asymptotics, 2.0, 200, {t2});
    bc.grid_n = std::size_t(1) << 20;
    adopt(o, run_log_asymptotics(bc), {"median_ratio_F1"});

    // The criterion is taken at t = 1e-2; the run continues to 1e-3 as a
    // diagnostic of the approach to the limit.
    auto sc = harness_config(ctx, ExperimentKind::log_asymptotics, 1.5, 200, {1e-2, 1e-3});
    auto sr = run_log_asymptotics(sc);
    for (double t : sc.t_list) {
        const auto* s = sr.find_statistic("median_ratio_F1", t);
        if (!s) continue;
        if (t == 1e-2)
            o.verdict().checks.push_back(make_check("median_ratio_F1(beta=1.5)", t, Rule::range, s->value,
                                                    s->std_error, s->n, 3.0, 0.0, 2.4, 3.6));
        else
            o.notes.push_back("diagnostic beta=1.5 t=" + Json(t).dump() + ": median ratio " + Json(s->value).dump() +
                              " (se " + Json(s->std_error).dump() + ")");
    }
    adopt(o, std::move(sr), {});
    return o;
}

Outcome c10_phi_solver(Context& ctx) {
    auto o = start(ctx, "C10");
    adopt_from(o, ctx.analytics_report(), {"phi_residual", "phi_at_zero", "phi_non_increasing"});
    const std::size_t n = 4000;
    std::uint64_t k = 0;
    for (double alpha : {-0.45, -0.4, -0.34}) {
        const double beta = 1.0 / (1.0 + alpha);
        const auto table = solve_phi_fixed_point(alpha, {0.0, 1.0}, 1e-10, 500);
        const StableExcursionBank bank(beta, 512, 4096, Seed{ctx.seed, 107, k});
        std::vector<double> lap(n);
        parallel_for(n, ctx.workers, [&](std::size_t i) {
            lap[i] = std::exp(-sample_stable_eta(beta, 1.0, 1e-3, bank, Seed{ctx.seed, 108 + k, i}).eta(1.0));
        });
        const auto l = mean_of(lap);
        o.verdict().checks.push_back(make_check("phi(1)_vs_truncated_mc(" + Json(alpha).dump() + ")", nan_t,
                                                Rule::tol_plus_3se, l.mean, l.std_error, l.n, table(1.0), 0.03));
        ++k;
    }
    return o;
}

Outcome c11_metrics(Context& ctx) {
    auto o = start(ctx, "C11");
    ExperimentConfig v;
    v.experiment = ExperimentKind::validation;
    v.suite = "metrics";
    v.seed = ctx.seed;
    v.workers = ctx.workers;
    adopt(o, run_validation_suite(v), {""});
    return o;
}

struct Criterion {
    std::string id;
    std::string title;
    std::function<Outcome(Context&)> run;
};

std::vector<Criterion> criteria() {
    return {
        {"C1", "Kennedy tail P(zeta > 0.8)", c1_kennedy},
        {"C2", "Brownian dislocation measure reproduces phi", c2_phi_nu},
        {"C3", "stable dislocation measure reproduces phi (MC)", c3_stable_phi},
        {"C4", "Brownian limit: eta(1) mean and Laplace transform", c4_brownian_limit},
        {"C5", "last fragment F_*/t^2 vs size-biased passage law", c5_last_fragment},
        {"C6", "total mass Laplace transform", c6_total_mass},
        {"C7", "largest fragment convergence and stability", c7_extinction},
        {"C8", "self-similarity of eta", c8_self_similarity},
        {"C9", "log F_1 / log t near beta/(beta-1)", c9_log_asymptotics},
        {"C10", "fixed-point solver and truncated MC", c10_phi_solver},
        {"C11", "metric properties and convergence transfer", c11_metrics},
    };
}

void print_detail(const Check& c) {
    std::printf("    [%s] %-40s", c.pass ? "ok" : "xx", c.name.c_str());
    if (!std::isnan(c.t)) std::printf(" t=%-9g", c.t);
    std::printf(" est=%.6g", c.estimate);
    if (c.std_error > 0.0) std::printf(" se=%.3g", c.std_error);
    if (c.rule == Rule::range)
        std::printf(" range=[%.6g, %.6g]", c.lo, c.hi);
    else
        std::printf(" target=%.6g tol=%.3g (%s)", c.target, c.tolerance, to_string(c.rule));
    std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    unsigned workers = 1, compare_workers = 2;
    std::uint64_t seed = 1;
    std::string out_dir;
    std::vector<std::string> known;
    app.add_option("--workers", workers, "Threads for the main pass")->default_val(1);
    app.add_option("--compare-workers", compare_workers, "Threads for the determinism pass")->default_val(2);
    app.add_option("--seed", seed, "Seed")->default_val(1);
    app.add_option("--out-dir", out_dir, "Write each criterion's canonical report here");
    app.add_option("--known-failure", known, "Criteria expected to fail; they still print FAIL")->delimiter(',');
    CLI11_PARSE(app, argc, argv);
    const std::set<std::string> known_set(known.begin(), known.end());

    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

    Context main_ctx{seed, workers, std::nullopt};
    Context cmp_ctx{seed, compare_workers, std::nullopt};
    std::vector<std::string> failed;
    bool identical = true;
    std::vector<std::string> differing;

    try {
        for (const auto& cr : criteria()) {
            const auto t0 = std::chrono::steady_clock::now();
            auto out = cr.run(main_ctx);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const bool pass = out.pass();
            std::printf("%s %-4s %s (%.1f s)\n", pass ? "PASS" : "FAIL", cr.id.c_str(), cr.title.c_str(), secs);
            for (const auto& c : out.verdict().checks) print_detail(c);
            for (const auto& s : out.verdict().statistics)
                std::printf("    stat %s = %.6g\n", s.name.c_str(), s.value);
            for (const auto& n : out.notes) std::printf("    note: %s\n", n.c_str());
            std::fflush(stdout);
            if (!pass) failed.push_back(cr.id);
            if (!out_dir.empty()) write_text(out_dir + "/" + cr.id + ".json", out.canonical());

            const auto again = cr.run(cmp_ctx);
            if (again.canonical() != out.canonical()) {
                identical = false;
                differing.push_back(cr.id);
            }
        }
    } catch (const std::exception& e) {
        std::printf("error: %s\n", e.what());
        return 2;
    }

    std::printf("%s C12  reports byte-identical across runs and worker counts (%u vs %u)\n",
                identical ? "PASS" : "FAIL", workers, compare_workers);
    for (const auto& d : differing) std::printf("    differs: %s\n", d.c_str());
    if (!identical) failed.push_back("C12");

    int unexpected = 0;
    for (const auto& f : failed)
        if (!known_set.count(f)) ++unexpected;
    std::printf("%zu of 12 criteria pass", 12 - failed.size());
    if (!failed.empty()) {
        std::printf("; failing:");
        for (const auto& f : failed) std::printf(" %s%s", f.c_str(), known_set.count(f) ? " (known)" : "");
    }
    std::printf("\n");
    return unexpected == 0 ? 0 : 1;
}
