#include "fragsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <thread>

#include "fragsim/analytics.hpp"
#include "fragsim/continuum.hpp"
#include "fragsim/limits.hpp"
#include "fragsim/metrics.hpp"
#include "fragsim/paths.hpp"
#include "fragsim/refine.hpp"
#include "fragsim/stats.hpp"

namespace fragsim {

const char* to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::extinction: return "extinction";
        case ExperimentKind::last_fragment: return "last_fragment";
        case ExperimentKind::total_mass: return "total_mass";
        case ExperimentKind::log_asymptotics: return "log_asymptotics";
        case ExperimentKind::validation: return "validation";
    }
    return "extinction";
}

ExperimentKind experiment_from_string(const std::string& s) {
    for (auto k : {ExperimentKind::extinction, ExperimentKind::last_fragment, ExperimentKind::total_mass,
                   ExperimentKind::log_asymptotics, ExperimentKind::validation})
        if (s == to_string(k)) return k;
    throw std::invalid_argument("unknown experiment: " + s);
}

const char* to_string(Rule rule) {
    switch (rule) {
        case Rule::max_tol_3se: return "max_tol_3se";
        case Rule::tol_plus_3se: return "tol_plus_3se";
        case Rule::both_3se_rel: return "both_3se_rel";
        case Rule::below: return "below";
        case Rule::range: return "range";
    }
    return "max_tol_3se";
}

Rule rule_from_string(const std::string& s) {
    for (auto r : {Rule::max_tol_3se, Rule::tol_plus_3se, Rule::both_3se_rel, Rule::below, Rule::range})
        if (s == to_string(r)) return r;
    throw std::invalid_argument("unknown rule: " + s);
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw std::invalid_argument("config: trials must be at least 1");
    if (!(beta > 1.0 && beta <= 2.0)) throw std::invalid_argument("config: beta outside (1,2]");
    if (experiment != ExperimentKind::validation) {
        if (t_list.empty()) throw std::invalid_argument("config: t_list is empty");
        for (std::size_t i = 0; i < t_list.size(); ++i) {
            if (!(t_list[i] > 0.0)) throw std::invalid_argument("config: t_list must be positive");
            if (i > 0 && !(t_list[i] < t_list[i - 1]))
                throw std::invalid_argument("config: t_list must be strictly descending");
        }
    }
    for (double l : lambdas)
        if (!(l >= 0.0)) throw std::invalid_argument("config: lambdas must be non-negative");
    if (suite != "all" && suite != "analytics" && suite != "metrics")
        throw std::invalid_argument("config: suite must be all, analytics or metrics");
    if (reference_grid < 16) throw std::invalid_argument("config: reference_grid below 16");
}

Check make_check(std::string name, double t, Rule rule, double estimate, double std_error, std::uint64_t n,
                 double target, double tolerance, double lo, double hi) {
    Check c{std::move(name), t, rule, estimate, std_error, n, target, tolerance, lo, hi, false};
    const double d = std::fabs(estimate - target);
    switch (rule) {
        case Rule::max_tol_3se: c.pass = d <= std::max(tolerance, 3.0 * std_error); break;
        case Rule::tol_plus_3se: c.pass = d <= tolerance + 3.0 * std_error; break;
        case Rule::both_3se_rel: c.pass = d <= 3.0 * std_error && d <= tolerance * std::fabs(target); break;
        case Rule::below: c.pass = estimate < target; break;
        case Rule::range: c.pass = estimate >= lo && estimate <= hi; break;
    }
    if (!std::isfinite(estimate)) c.pass = false;
    return c;
}

bool ExperimentReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

namespace {

bool same_t(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

}  // namespace

const Statistic* ExperimentReport::find_statistic(const std::string& name, double t) const {
    for (const auto& s : statistics)
        if (s.name == name && same_t(s.t, t)) return &s;
    return nullptr;
}

const Check* ExperimentReport::find_check(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

// ---- serialization ----

namespace {

void put_t(Json& j, double t) {
    if (!std::isnan(t)) j["t"] = t;
}

double get_t(const Json& j) { return j.contains("t") ? j.at("t").get<double>() : std::nan(""); }

Json config_json(const ExperimentConfig& c) {
    return Json{{"experiment", to_string(c.experiment)},
                {"beta", c.beta},
                {"trials", c.trials},
                {"grid_n", c.grid_n},
                {"t_list", c.t_list},
                {"seed", c.seed},
                {"out_path", c.out_path},
                {"lambdas", c.lambdas},
                {"suite", c.suite},
                {"raw", c.raw},
                {"ks_threshold", c.ks_threshold},
                {"reference_grid", c.reference_grid}};
}

ExperimentConfig config_from_json(const Json& j) {
    ExperimentConfig c;
    c.experiment = experiment_from_string(j.at("experiment").get<std::string>());
    c.beta = j.at("beta").get<double>();
    c.trials = j.at("trials").get<std::uint64_t>();
    c.grid_n = j.at("grid_n").get<std::size_t>();
    c.t_list = j.at("t_list").get<std::vector<double>>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.out_path = j.at("out_path").get<std::string>();
    c.lambdas = j.at("lambdas").get<std::vector<double>>();
    c.suite = j.at("suite").get<std::string>();
    c.raw = j.at("raw").get<bool>();
    c.ks_threshold = j.at("ks_threshold").get<double>();
    c.reference_grid = j.at("reference_grid").get<std::size_t>();
    return c;
}

}  // namespace

Json to_json(const ExperimentReport& r, bool with_timing) {
    Json j;
    j["schema"] = report_schema;
    j["config"] = config_json(r.config);
    Json stats = Json::array();
    for (const auto& s : r.statistics) {
        Json e{{"name", s.name}};
        put_t(e, s.t);
        e["value"] = s.value;
        e["std_error"] = s.std_error;
        e["n"] = s.n;
        stats.push_back(e);
    }
    j["statistics"] = stats;
    Json checks = Json::array();
    for (const auto& c : r.checks) {
        Json e{{"name", c.name}};
        put_t(e, c.t);
        e["rule"] = to_string(c.rule);
        e["estimate"] = c.estimate;
        e["std_error"] = c.std_error;
        e["n"] = c.n;
        e["target"] = c.target;
        e["tolerance"] = c.tolerance;
        if (c.rule == Rule::range) {
            e["lo"] = c.lo;
            e["hi"] = c.hi;
        }
        e["pass"] = c.pass;
        checks.push_back(e);
    }
    j["checks"] = checks;
    j["all_pass"] = r.all_pass();
    j["warnings"] = r.warnings;
    if (!r.raw.empty()) {
        Json raw = Json::array();
        for (const auto& s : r.raw) {
            Json e{{"name", s.name}};
            put_t(e, s.t);
            e["values"] = s.values;
            raw.push_back(e);
        }
        j["raw"] = raw;
    }
    if (with_timing) j["wall_time_s"] = r.wall_time_s;
    return j;
}

ExperimentReport report_from_json(const Json& j) {
    if (j.at("schema").get<std::string>() != report_schema)
        throw std::runtime_error("report: unsupported schema " + j.at("schema").get<std::string>());
    ExperimentReport r;
    r.config = config_from_json(j.at("config"));
    for (const auto& e : j.at("statistics"))
        r.statistics.push_back({e.at("name").get<std::string>(), get_t(e), e.at("value").get<double>(),
                                e.at("std_error").get<double>(), e.at("n").get<std::uint64_t>()});
    for (const auto& e : j.at("checks")) {
        Check c;
        c.name = e.at("name").get<std::string>();
        c.t = get_t(e);
        c.rule = rule_from_string(e.at("rule").get<std::string>());
        c.estimate = e.at("estimate").get<double>();
        c.std_error = e.at("std_error").get<double>();
        c.n = e.at("n").get<std::uint64_t>();
        c.target = e.at("target").get<double>();
        c.tolerance = e.at("tolerance").get<double>();
        if (e.contains("lo")) c.lo = e.at("lo").get<double>();
        if (e.contains("hi")) c.hi = e.at("hi").get<double>();
        c.pass = e.at("pass").get<bool>();
        r.checks.push_back(c);
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    if (j.contains("raw"))
        for (const auto& e : j.at("raw"))
            r.raw.push_back({e.at("name").get<std::string>(), get_t(e), e.at("values").get<std::vector<double>>()});
    if (j.contains("wall_time_s")) r.wall_time_s = j.at("wall_time_s").get<double>();
    return r;
}

std::string canonical_report(const ExperimentReport& report) { return to_json(report, false).dump(2) + "\n"; }

void write_raw_csv(const ExperimentReport& report, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file);
    out << std::setprecision(17) << "series,t,index,value\n";
    for (const auto& s : report.raw)
        for (std::size_t i = 0; i < s.values.size(); ++i)
            out << s.name << ',' << (std::isnan(s.t) ? std::string() : std::to_string(s.t)) << ',' << i << ','
                << s.values[i] << '\n';
}

// ---- execution ----

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t failed_at = n;
    std::exception_ptr failure;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (i < failed_at) {
                    failed_at = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned k = std::min<std::size_t>(workers, n);
    for (unsigned w = 0; w < k; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

std::size_t default_grid(double t_min) {
    const double need = 16.0 / (t_min * t_min);
    std::size_t n = 1024;
    while (double(n) < need) n *= 2;
    return n;
}

namespace {

// Stream ids for the consumers of (seed, trial).
enum Stream : std::uint64_t {
    s_path = 1,
    s_bridge = 2,
    s_limit = 3,
    s_limit_bridge = 4,
    s_size_biased = 5,
    s_near_max = 6,
    s_bank = 7,
    s_zeta = 8,
};

Seed trial_seed(const ExperimentConfig& c, Stream s, std::size_t i) { return Seed{c.seed, s, i}; }

struct LevelBlocks {
    RankedMasses ranked;
    double last = 0.0;
    bool beyond = false;  // t >= zeta; last is 0 then
};

using TrialBlocks = std::vector<LevelBlocks>;

double alpha_of(double beta) { return 1.0 / beta - 1.0; }

std::size_t grid_for(const ExperimentConfig& c) {
    const double t_min = c.t_list.back();
    return std::max(c.grid_n, default_grid(t_min));
}

TrialBlocks brownian_trial(const ExperimentConfig& c, std::size_t grid, std::size_t i) {
    const auto path = sample_brownian_excursion(grid, trial_seed(c, s_path, i));
    Rng rng(trial_seed(c, s_bridge, i));
    const auto ext = sample_bridge_extrema(path, rng);
    const auto top = refined_extinction(path, ext);
    const auto fine = refined_path(path, ext);
    TrialBlocks out;
    for (double t : c.t_list) {
        LevelBlocks b;
        if (t >= top.zeta) {
            b.beyond = true;
            b.ranked.masses = {path.t1() - path.t0()};
        } else {
            const auto set = level_set(fine, top.zeta - t);
            b.ranked = ranked_lengths(set);
            const long k = set.component_of(top.x_star);
            b.last = k < 0 ? 0.0 : set.intervals[std::size_t(k)].length();
        }
        out.push_back(std::move(b));
    }
    return out;
}

TrialBlocks stable_trial(const ExperimentConfig& c, const EtaBank& bank, std::size_t i) {
    const auto s = sample_stable_near_max(c.t_list, bank, trial_seed(c, s_near_max, i));
    TrialBlocks out;
    for (std::size_t k = 0; k < c.t_list.size(); ++k)
        {
        const bool beyond = c.t_list[k] >= s.zeta;
        out.push_back({s.fragments[k], beyond ? 0.0 : s.last_fragment[k], beyond});
    }
    return out;
}

std::optional<EtaBank> bank_for(const ExperimentConfig& c) {
    if (c.beta == 2.0) return std::nullopt;
    EtaBankOptions o;
    o.size = 4096;
    o.generations = 16;
    return EtaBank(c.beta, Seed{c.seed, s_bank, 0}, o);
}

std::vector<TrialBlocks> run_trials(const ExperimentConfig& c, const std::optional<EtaBank>& bank) {
    std::vector<TrialBlocks> out(c.trials);
    const std::size_t grid = grid_for(c);
    parallel_for(c.trials, c.workers, [&](std::size_t i) {
        out[i] = bank ? stable_trial(c, *bank, i) : brownian_trial(c, grid, i);
    });
    return out;
}

RankedMasses brownian_limit_trial(const ExperimentConfig& c, std::size_t i) {
    BrownianHInfinityOptions o;
    o.complete_level = 1.0;
    const auto h = sample_h_infinity_brownian(4.0, c.reference_grid, trial_seed(c, s_limit, i), o);
    Rng rng(trial_seed(c, s_limit_bridge, i));
    const auto ext = sample_bridge_extrema(h.path, rng);
    return ranked_lengths(bridge_sublevel_set(h.path, ext, 1.0));
}

std::vector<RankedMasses> limit_samples(const ExperimentConfig& c, const std::optional<EtaBank>& bank) {
    std::vector<RankedMasses> out(c.trials);
    parallel_for(c.trials, c.workers, [&](std::size_t i) {
        out[i] = bank ? stable_limit_fragmentation(*bank, trial_seed(c, s_limit, i)) : brownian_limit_trial(c, i);
    });
    return out;
}

void add_stat(ExperimentReport& r, const std::string& name, double t, const MeanSe& m) {
    r.statistics.push_back({name, t, m.mean, m.std_error, m.n});
}

void add_raw(ExperimentReport& r, const std::string& name, double t, const std::vector<double>& v) {
    if (r.config.raw) r.raw.push_back({name, t, v});
}

void grid_warnings(ExperimentReport& r, std::size_t grid) {
    if (r.config.beta != 2.0) return;
    const double osc = std::sqrt(1.0 / double(grid));
    for (double t : r.config.t_list)
        if (t < 4.0 * osc)
            r.warnings.push_back("t=" + std::to_string(t) + " is below 4 grid oscillations (" + std::to_string(osc) +
                                 "); raise grid_n");
}

template <class F>
ExperimentReport timed(const ExperimentConfig& c, F body) {
    c.validate();
    const auto start = std::chrono::steady_clock::now();
    ExperimentReport r;
    r.config = c;
    body(r);
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!c.out_path.empty()) {
        write_text(c.out_path, to_json(r).dump(2) + "\n");
        if (c.raw) write_raw_csv(r, c.out_path + ".csv");
    }
    return r;
}

}  // namespace

ExperimentReport run_extinction_experiment(const ExperimentConfig& config) {
    if (config.experiment != ExperimentKind::extinction)
        throw std::invalid_argument("run_extinction_experiment: experiment is not extinction");
    return timed(config, [](ExperimentReport& r) {
        const auto& c = r.config;
        const auto bank = bank_for(c);
        if (!bank) grid_warnings(r, grid_for(c));
        const auto trials = run_trials(c, bank);
        const auto limit = limit_samples(c, bank);
        const double inv_alpha = 1.0 / alpha_of(c.beta);
        const double threshold = c.ks_threshold > 0.0 ? c.ks_threshold : (bank ? 0.08 : 0.06);
        constexpr int top_k = 3;

        std::vector<std::vector<double>> ref(top_k);
        for (const auto& m : limit)
            for (int k = 0; k < top_k; ++k) ref[k].push_back(m[k]);
        std::vector<double> ref_means;
        for (int k = 0; k < top_k; ++k) {
            const auto ms = mean_se(ref[k]);
            ref_means.push_back(ms.mean);
            add_stat(r, "limit_F" + std::to_string(k + 1) + "_mean", std::nan(""), ms);
            add_raw(r, "limit_F" + std::to_string(k + 1), std::nan(""), ref[k]);
        }

        std::vector<double> ks1, prev_f1;
        for (std::size_t j = 0; j < c.t_list.size(); ++j) {
            const double t = c.t_list[j];
            const double scale = std::pow(t, inv_alpha);
            RankedMasses mean_vec;
            double se2 = 0.0;
            std::vector<double> f1;
            for (int k = 0; k < top_k; ++k) {
                std::vector<double> x;
                for (const auto& tr : trials) x.push_back(scale * tr[j].ranked[k]);
                const auto ms = mean_se(x);
                const std::string tag = "F" + std::to_string(k + 1);
                add_stat(r, tag + "_rescaled_mean", t, ms);
                const double ks = ks_two_sample(x, ref[k]);
                r.statistics.push_back(
                    {"ks_" + tag + "_vs_limit", t, ks, ks_null_sd(x.size(), ref[k].size()), x.size()});
                add_raw(r, tag + "_rescaled", t, x);
                mean_vec.masses.push_back(ms.mean);
                se2 += ms.std_error * ms.std_error;
                if (k == 0) {
                    ks1.push_back(ks);
                    f1 = x;
                }
            }
            RankedMasses ref_vec{ref_means};
            r.statistics.push_back({"d_ranked_mean_top3", t, d_ranked(mean_vec, ref_vec), std::sqrt(se2), c.trials});
            std::uint64_t beyond = 0;
            for (const auto& tr : trials) beyond += tr[j].beyond ? 1 : 0;
            r.statistics.push_back({"beyond_extinction", t, double(beyond), 0.0, c.trials});
            if (bank && j > 0) {
                const double ks = ks_two_sample(prev_f1, f1);
                r.statistics.push_back({"ks_F1_vs_previous_t", t, ks, ks_null_sd(f1.size(), prev_f1.size()), f1.size()});
                if (j + 1 == c.t_list.size())
                    r.checks.push_back(make_check("ks_F1_stability", t, Rule::below, ks,
                                                  ks_null_sd(f1.size(), prev_f1.size()), f1.size(), threshold, 0.0));
            }
            prev_f1 = std::move(f1);
        }
        const double t_min = c.t_list.back();
        if (!bank)
            r.checks.push_back(make_check("ks_F1_vs_limit", t_min, Rule::below, ks1.back(),
                                          ks_null_sd(c.trials, c.trials), c.trials, threshold, 0.0));
        for (std::size_t j = 1; j < ks1.size(); ++j)
            r.checks.push_back(make_check("ks_F1_non_increasing", c.t_list[j], Rule::below, ks1[j] - ks1[j - 1],
                                          ks_null_sd(c.trials, c.trials), c.trials, 0.02, 0.0));
    });
}

ExperimentReport run_last_fragment_experiment(const ExperimentConfig& config) {
    if (config.experiment != ExperimentKind::last_fragment)
        throw std::invalid_argument("run_last_fragment_experiment: experiment is not last_fragment");
    return timed(config, [](ExperimentReport& r) {
        const auto& c = r.config;
        const auto bank = bank_for(c);
        if (!bank) grid_warnings(r, grid_for(c));
        const auto trials = run_trials(c, bank);
        const double alpha = alpha_of(c.beta);

        // Reference law of zeta_* : zeta biased by zeta^{-1/alpha - 1}.
        std::vector<double> ref(c.trials), weights(c.trials, 1.0);
        parallel_for(c.trials, c.workers, [&](std::size_t i) {
            if (bank) {
                ref[i] = sample_stable_excursion_max(*bank, trial_seed(c, s_zeta, i));
                weights[i] = std::pow(ref[i], -1.0 / alpha - 1.0);
            } else {
                ref[i] = size_biased_sample(1.0, trial_seed(c, s_size_biased, i));
            }
        });
        add_raw(r, "zeta_star_reference", std::nan(""), ref);

        const double t_min = c.t_list.back();
        for (std::size_t j = 0; j < c.t_list.size(); ++j) {
            const double t = c.t_list[j];
            std::vector<double> y, scaled;
            for (const auto& tr : trials) {
                if (!(tr[j].last > 0.0)) continue;
                y.push_back(t * std::pow(tr[j].last, alpha));
                scaled.push_back(tr[j].last * std::pow(t, 1.0 / alpha));
            }
            add_stat(r, "t_F_star_pow_alpha_mean", t, mean_se(y));
            add_stat(r, "F_star_rescaled_mean", t, mean_se(scaled));
            add_raw(r, "t_F_star_pow_alpha", t, y);
            const double ks = ks_weighted(y, ref, weights);
            r.statistics.push_back({"ks_vs_size_biased_zeta", t, ks, ks_null_sd(y.size(), ref.size()), y.size()});
            if (bank) {
                // The same limit through eta(1): zeta_* has the law of eta(1)^alpha.
                std::vector<double> eta_ref;
                for (double e : bank->samples()) eta_ref.push_back(std::pow(e, alpha));
                r.statistics.push_back({"ks_vs_eta_bank", t, ks_two_sample(y, eta_ref),
                                        ks_null_sd(y.size(), eta_ref.size()), y.size()});
            }
            std::vector<std::pair<double, MeanSe>> laplace;
            for (double lam : c.lambdas) {
                std::vector<double> e;
                for (double s : scaled) e.push_back(std::exp(-lam * s));
                const auto ms = mean_se(e);
                add_stat(r, "laplace_F_star_rescaled(" + Json(lam).dump() + ")", t, ms);
                laplace.emplace_back(lam, ms);
            }
            if (bank && t == t_min) {
                // F_* t^{1/alpha} tends in law to eta(1), whose transform the solver gives.
                std::vector<double> grid{0.0};
                for (const auto& [lam, ms] : laplace)
                    if (lam > 0.0) grid.push_back(lam);
                std::sort(grid.begin(), grid.end());
                const auto phi = solve_phi_fixed_point(alpha, grid, 1e-9, 500);
                for (const auto& [lam, ms] : laplace)
                    r.checks.push_back(make_check("laplace_F_star_rescaled_vs_phi(" + Json(lam).dump() + ")", t,
                                                  Rule::tol_plus_3se, ms.mean, ms.std_error, ms.n, phi(lam), 0.005));
            }
            if (!bank && t == t_min) {
                r.checks.push_back(make_check("ks_last_fragment_vs_size_biased", t, Rule::below, ks,
                                              ks_null_sd(y.size(), ref.size()), y.size(), 0.05, 0.0));
                const auto m = mean_se(scaled);
                r.checks.push_back(
                    make_check("mean_F_star_over_t2", t, Rule::max_tol_3se, m.mean, m.std_error, m.n, 2.0 / 3.0, 0.1));
                for (const auto& [lam, ms] : laplace)
                    r.checks.push_back(make_check("laplace_F_star_over_t2(" + Json(lam).dump() + ")", t,
                                                  Rule::max_tol_3se, ms.mean, ms.std_error, ms.n,
                                                  laplace_last_fragment_brownian(lam), 0.02));
            }
        }
    });
}

ExperimentReport run_total_mass_experiment(const ExperimentConfig& config) {
    if (config.experiment != ExperimentKind::total_mass)
        throw std::invalid_argument("run_total_mass_experiment: experiment is not total_mass");
    if (config.beta != 2.0) throw std::invalid_argument("run_total_mass_experiment: closed form needs beta = 2");
    return timed(config, [](ExperimentReport& r) {
        const auto& c = r.config;
        grid_warnings(r, grid_for(c));
        const auto trials = run_trials(c, std::nullopt);
        std::vector<double> lams{0.0};
        for (double l : c.lambdas)
            if (l > 0.0) lams.push_back(l);
        std::sort(lams.begin(), lams.end());
        lams.erase(std::unique(lams.begin(), lams.end()), lams.end());
        const double t_min = c.t_list.back();
        for (std::size_t j = 0; j < c.t_list.size(); ++j) {
            const double t = c.t_list[j];
            std::vector<double> m;
            for (const auto& tr : trials) m.push_back(tr[j].ranked.sum() / (t * t));
            add_stat(r, "mass_over_t2_mean", t, mean_se(m));
            add_raw(r, "mass_over_t2", t, m);
            double worst_increase = -std::numeric_limits<double>::infinity();
            double prev = 0.0;
            for (std::size_t a = 0; a < lams.size(); ++a) {
                std::vector<double> e;
                for (double x : m) e.push_back(std::exp(-lams[a] * x));
                const auto ms = mean_se(e);
                const std::string lam = Json(lams[a]).dump();
                add_stat(r, "laplace_mass(" + lam + ")", t, ms);
                if (a > 0) worst_increase = std::max(worst_increase, ms.mean - prev);
                prev = ms.mean;
                if (t != t_min) continue;
                if (lams[a] == 0.0)
                    r.checks.push_back(
                        make_check("laplace_mass(0)_is_one", t, Rule::range, ms.mean, 0.0, ms.n, 1.0, 0.0, 1.0, 1.0));
                else
                    r.checks.push_back(make_check("laplace_mass(" + lam + ")", t, Rule::max_tol_3se, ms.mean,
                                                  ms.std_error, ms.n, laplace_total_mass_brownian(lams[a]), 0.02));
            }
            if (t == t_min && lams.size() > 1)
                r.checks.push_back(
                    make_check("laplace_mass_decreasing", t, Rule::below, worst_increase, 0.0, c.trials, 0.0, 0.0));
        }
    });
}

ExperimentReport run_log_asymptotics(const ExperimentConfig& config) {
    if (config.experiment != ExperimentKind::log_asymptotics)
        throw std::invalid_argument("run_log_asymptotics: experiment is not log_asymptotics");
    return timed(config, [](ExperimentReport& r) {
        const auto& c = r.config;
        const auto bank = bank_for(c);
        if (!bank) grid_warnings(r, grid_for(c));
        const auto trials = run_trials(c, bank);
        const double target = c.beta / (c.beta - 1.0);
        const double band = c.beta == 2.0 ? 0.15 : 0.2;
        std::vector<double> lt, lf;
        std::uint64_t violations = 0;
        for (std::size_t j = 0; j < c.t_list.size(); ++j) {
            const double t = c.t_list[j];
            std::vector<double> r1, rs, logf1;
            std::uint64_t excluded = 0;
            for (const auto& tr : trials) {
                const auto& b = tr[j];
                if (b.beyond || !(b.ranked[0] > 0.0) || !(b.last > 0.0)) {
                    ++excluded;
                    continue;
                }
                if (b.last > b.ranked[0]) ++violations;
                r1.push_back(std::log(b.ranked[0]) / std::log(t));
                rs.push_back(std::log(b.last) / std::log(t));
                logf1.push_back(std::log(b.ranked[0]));
            }
            r.statistics.push_back({"excluded", t, double(excluded), 0.0, c.trials});
            add_raw(r, "ratio_F1", t, r1);
            add_raw(r, "ratio_F_star", t, rs);
            if (r1.empty()) continue;
            const auto med1 = quantile_se(r1, 0.5);
            const auto q25 = quantile_se(r1, 0.25), q75 = quantile_se(r1, 0.75);
            add_stat(r, "median_ratio_F1", t, med1);
            r.statistics.push_back({"iqr_ratio_F1", t, q75.mean - q25.mean,
                                    std::hypot(q25.std_error, q75.std_error), r1.size()});
            const auto meds = quantile_se(rs, 0.5);
            const auto s25 = quantile_se(rs, 0.25), s75 = quantile_se(rs, 0.75);
            add_stat(r, "median_ratio_F_star", t, meds);
            r.statistics.push_back({"iqr_ratio_F_star", t, s75.mean - s25.mean,
                                    std::hypot(s25.std_error, s75.std_error), rs.size()});
            lt.push_back(std::log(t));
            lf.push_back(quantile_se(logf1, 0.5).mean);
            if (j + 1 == c.t_list.size())
                r.checks.push_back(make_check("median_ratio_F1", t, Rule::range, med1.mean, med1.std_error, med1.n,
                                              target, 0.0, target * (1.0 - band), target * (1.0 + band)));
        }
        r.checks.push_back(make_check("F_star_le_F1_pathwise", std::nan(""), Rule::range, double(violations), 0.0,
                                      c.trials * c.t_list.size(), 0.0, 0.0, 0.0, 0.0));
        if (lt.size() >= 2) {
            const double mx = std::accumulate(lt.begin(), lt.end(), 0.0) / double(lt.size());
            const double my = std::accumulate(lf.begin(), lf.end(), 0.0) / double(lf.size());
            double sxx = 0.0, sxy = 0.0;
            for (std::size_t k = 0; k < lt.size(); ++k) {
                sxx += (lt[k] - mx) * (lt[k] - mx);
                sxy += (lt[k] - mx) * (lf[k] - my);
            }
            const double slope = sxy / sxx;
            double se = 0.0;
            if (lt.size() > 2) {
                double rss = 0.0;
                for (std::size_t k = 0; k < lt.size(); ++k) {
                    const double e = lf[k] - my - slope * (lt[k] - mx);
                    rss += e * e;
                }
                se = std::sqrt(rss / double(lt.size() - 2) / sxx);
            }
            r.statistics.push_back({"slope_median_log_F1_vs_log_t", std::nan(""), slope, se, lt.size()});
        }
    });
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    switch (config.experiment) {
        case ExperimentKind::extinction: return run_extinction_experiment(config);
        case ExperimentKind::last_fragment: return run_last_fragment_experiment(config);
        case ExperimentKind::total_mass: return run_total_mass_experiment(config);
        case ExperimentKind::log_asymptotics: return run_log_asymptotics(config);
        case ExperimentKind::validation: return run_validation_suite(config);
    }
    throw std::invalid_argument("run_experiment: unknown experiment");
}

}  // namespace fragsim
