#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "fragsim/fragmentation.hpp"
#include "fragsim/harness.hpp"
#include "fragsim/io.hpp"
#include "fragsim/paths.hpp"
#include "fragsim/stats.hpp"
#include "helpers.hpp"

using namespace fragsim;
namespace fs = std::filesystem;

namespace {

std::string tmp(const std::string& name) { return (fs::temp_directory_path() / ("fragsim_test_" + name)).string(); }

ExperimentConfig small(ExperimentKind kind, double beta = 2.0) {
    ExperimentConfig c;
    c.experiment = kind;
    c.beta = beta;
    c.trials = 24;
    c.t_list = {0.1, 0.05};
    c.reference_grid = 512;
    c.raw = true;
    return c;
}

}  // namespace

TEST_CASE("summary statistics") {
    const auto m = mean_se({1.0, 2.0, 3.0});
    CHECK(m.mean == 2.0);
    CHECK(m.std_error == doctest::Approx(1.0 / std::sqrt(3.0)));
    CHECK(m.n == 3);
    CHECK(quantile_se({4.0, 1.0, 3.0, 2.0}, 0.5).mean == 2.5);
    CHECK(ks_two_sample({1, 2, 3}, {1, 2, 3}) == 0.0);
    CHECK(ks_two_sample({1, 2, 3}, {4, 5}) == 1.0);
    CHECK(ks_two_sample({1, 2}, {1.5}) == 0.5);
    CHECK(ks_weighted({1, 2}, {1, 2}, {1, 0}) == 0.5);
    CHECK_THROWS_AS(ks_weighted({1}, {1}, {0}), std::invalid_argument);
    CHECK_THROWS_AS(quantile_se({}, 0.5), std::invalid_argument);
    CHECK(ks_critical(100, 100, 0.05) == doctest::Approx(1.358 * std::sqrt(0.02)).epsilon(1e-3));
}

TEST_CASE("check rules") {
    CHECK(make_check("a", NAN, Rule::max_tol_3se, 1.05, 0.01, 10, 1.0, 0.02).pass == false);
    CHECK(make_check("a", NAN, Rule::max_tol_3se, 1.05, 0.02, 10, 1.0, 0.02).pass == true);
    CHECK(make_check("a", NAN, Rule::tol_plus_3se, 1.05, 0.012, 10, 1.0, 0.02).pass == true);
    CHECK(make_check("a", NAN, Rule::both_3se_rel, 1.04, 0.02, 10, 1.0, 0.05).pass == true);
    CHECK(make_check("a", NAN, Rule::both_3se_rel, 1.06, 0.02, 10, 1.0, 0.05).pass == false);
    CHECK(make_check("a", NAN, Rule::below, 0.05, 0.0, 10, 0.06, 0.0).pass == true);
    CHECK(make_check("a", NAN, Rule::below, 0.06, 0.0, 10, 0.06, 0.0).pass == false);
    CHECK(make_check("a", NAN, Rule::range, 2.0, 0.0, 10, 0.0, 0.0, 1.7, 2.3).pass == true);
    CHECK(make_check("a", NAN, Rule::range, NAN, 0.0, 10, 0.0, 0.0, 1.7, 2.3).pass == false);
}

TEST_CASE("config validation") {
    auto c = small(ExperimentKind::extinction);
    CHECK_NOTHROW(c.validate());
    c.trials = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = small(ExperimentKind::extinction);
    c.t_list = {0.05, 0.1};
    CHECK_THROWS_AS(run_experiment(c), std::invalid_argument);
    c.t_list = {0.1, -0.05};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = small(ExperimentKind::total_mass, 1.5);
    CHECK_THROWS_AS(run_experiment(c), std::invalid_argument);
    c = small(ExperimentKind::extinction);
    CHECK_THROWS_AS(run_last_fragment_experiment(c), std::invalid_argument);
    CHECK_THROWS_AS(experiment_from_string("nope"), std::invalid_argument);
}

TEST_CASE("parallel_for visits each index once and rethrows the first failure") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    try {
        parallel_for(100, 3, [](std::size_t i) {
            if (i == 17 || i == 60) throw std::runtime_error(std::to_string(i));
        });
        FAIL("expected a throw");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "17");
    }
}

TEST_CASE("default grid follows 16 / t^2") {
    CHECK(default_grid(0.02) == 65536);
    CHECK(default_grid(0.1) == 2048);
    CHECK(default_grid(10.0) == 1024);
}

TEST_CASE("reports are identical across worker counts and round-trip through JSON") {
    for (auto kind : {ExperimentKind::extinction, ExperimentKind::last_fragment, ExperimentKind::total_mass,
                      ExperimentKind::log_asymptotics}) {
        auto c = small(kind);
        const auto one = run_experiment(c);
        c.workers = 3;
        const auto three = run_experiment(c);
        CHECK(canonical_report(one) == canonical_report(three));
        const auto back = report_from_json(Json::parse(to_json(one).dump()));
        CHECK(canonical_report(back) == canonical_report(one));
        CHECK(back.wall_time_s == one.wall_time_s);
        for (const auto& s : one.statistics) CHECK(s.n > 0);
    }
}

TEST_CASE("stable reports are identical across worker counts") {
    auto c = small(ExperimentKind::extinction, 1.5);
    c.trials = 8;
    const auto one = run_experiment(c);
    c.workers = 2;
    CHECK(canonical_report(one) == canonical_report(run_experiment(c)));
}

TEST_CASE("report and raw CSV files") {
    auto c = small(ExperimentKind::total_mass);
    c.out_path = tmp("report.json");
    const auto r = run_experiment(c);
    const auto j = Json::parse(read_text(c.out_path));
    CHECK(j.at("schema") == report_schema);
    CHECK(j.at("all_pass") == r.all_pass());
    CHECK(j.contains("wall_time_s"));
    const auto csv = read_text(c.out_path + ".csv");
    CHECK(csv.rfind("series,t,index,value\n", 0) == 0);
    fs::remove(c.out_path);
    fs::remove(c.out_path + ".csv");
}

TEST_CASE("metrics validation suite passes") {
    ExperimentConfig c;
    c.experiment = ExperimentKind::validation;
    c.suite = "metrics";
    const auto r = run_experiment(c);
    CHECK(r.checks.size() >= 5);
    for (const auto& ch : r.checks) CHECK_MESSAGE(ch.pass, ch.name);
    c.suite = "bogus";
    CHECK_THROWS_AS(run_experiment(c), std::invalid_argument);
}

TEST_CASE("path CSV round trip") {
    const auto p = sample_brownian_excursion(64, Seed{1, 0, 0});
    const auto file = tmp("path.csv");
    write_path(p, file);
    const auto q = read_path(file);
    CHECK(q.values() == p.values());
    CHECK(q.dt() == p.dt());
    CHECK(q.meta().kind == PathKind::excursion);
    write_text(file, read_text(file) + "2,0\n");
    CHECK_THROWS_AS(read_path(file), std::runtime_error);
    fs::remove(file);
    fs::remove(file + ".json");
}

TEST_CASE("snapshot JSON") {
    const auto j = snapshot_json(0.5, level_set(test::tent(), 0.5));
    CHECK(j.dump() == R"({"level":0.5,"intervals":[[0.25,0.75]],"ranked":[0.5]})");
}
