#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "fragsim/io.hpp"

namespace fragsim {

enum class ExperimentKind { extinction, last_fragment, total_mass, log_asymptotics, validation };

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& s);

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::extinction;
    double beta = 2.0;
    std::uint64_t trials = 1000;
    std::size_t grid_n = 0;  // 0: smallest power of two with grid_n >= 16 / min(t)^2
    std::vector<double> t_list{0.1, 0.05, 0.02};
    std::uint64_t seed = 1;
    std::string out_path;
    std::vector<double> lambdas{0.5, 1.0, 2.0};
    std::string suite = "all";  // validation: all | analytics | metrics
    bool raw = false;           // keep per-trial values in the report
    double ks_threshold = 0.0;  // 0: the default for the experiment and beta
    std::size_t reference_grid = 8192;  // Bessel construction cells per side
    unsigned workers = 1;       // execution only, not echoed in the report

    void validate() const;
};

struct Statistic {
    std::string name;
    double t = std::numeric_limits<double>::quiet_NaN();  // NaN: not tied to a level
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t n = 0;
};

enum class Rule {
    max_tol_3se,     // |est - target| <= max(tolerance, 3 se)
    tol_plus_3se,    // |est - target| <= tolerance + 3 se
    both_3se_rel,    // |est - target| <= 3 se and <= tolerance |target|
    below,           // est < target
    range,           // lo <= est <= hi
};

const char* to_string(Rule rule);
Rule rule_from_string(const std::string& s);

struct Check {
    std::string name;
    double t = std::numeric_limits<double>::quiet_NaN();
    Rule rule = Rule::max_tol_3se;
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t n = 0;
    double target = 0.0;
    double tolerance = 0.0;
    double lo = 0.0, hi = 0.0;
    bool pass = false;
};

Check make_check(std::string name, double t, Rule rule, double estimate, double std_error, std::uint64_t n,
                 double target, double tolerance, double lo = 0.0, double hi = 0.0);

struct RawSeries {
    std::string name;
    double t = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> values;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<Statistic> statistics;
    std::vector<Check> checks;
    std::vector<std::string> warnings;
    std::vector<RawSeries> raw;
    double wall_time_s = 0.0;

    bool all_pass() const;
    const Statistic* find_statistic(const std::string& name, double t = std::numeric_limits<double>::quiet_NaN()) const;
    const Check* find_check(const std::string& name) const;
};

inline constexpr const char* report_schema = "fragsim.report/1";

// Wall time is left out when with_timing is false, which gives the form that
// must be identical across runs and worker counts.
Json to_json(const ExperimentReport& report, bool with_timing = true);
ExperimentReport report_from_json(const Json& j);
std::string canonical_report(const ExperimentReport& report);

// Raw per-trial values as CSV "series,t,index,value".
void write_raw_csv(const ExperimentReport& report, const std::string& file);

// Calls fn(i) for i in [0, n) on the given number of threads. Each index is
// run exactly once; callers store results by index.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

std::size_t default_grid(double t_min);

ExperimentReport run_extinction_experiment(const ExperimentConfig& config);
ExperimentReport run_last_fragment_experiment(const ExperimentConfig& config);
ExperimentReport run_total_mass_experiment(const ExperimentConfig& config);
ExperimentReport run_log_asymptotics(const ExperimentConfig& config);
ExperimentReport run_validation_suite(const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace fragsim
