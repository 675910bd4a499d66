#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fragsim/analytics.hpp"
#include "fragsim/fragmentation.hpp"
#include "fragsim/paths.hpp"
#include "fragsim/stats.hpp"
#include "helpers.hpp"

using namespace fragsim;

TEST_CASE("bridge on two cells") {
    const auto p = sample_brownian_bridge(2, Seed{3, 0, 0});
    REQUIRE(p.n() == 2);
    CHECK(p[0] == 0.0);
    CHECK(p[2] == 0.0);
    CHECK(p.t1() == doctest::Approx(1.0));
    CHECK_THROWS_AS(sample_brownian_bridge(1, Seed{}), std::invalid_argument);
}

TEST_CASE("bridge is deterministic per seed") {
    CHECK(sample_brownian_bridge(4, Seed{9, 1, 2}).values() == sample_brownian_bridge(4, Seed{9, 1, 2}).values());
    CHECK(sample_brownian_bridge(4, Seed{9, 1, 2}).values() != sample_brownian_bridge(4, Seed{9, 1, 3}).values());
}

TEST_CASE("bridge marginals: mean 0 and variance t(1-t)") {
    const int n = 100000;
    std::vector<double> q1, mid, q3;
    for (int i = 0; i < n; ++i) {
        const auto p = sample_brownian_bridge(4, Seed{1, 0, std::uint64_t(i)});
        q1.push_back(p[1]);
        mid.push_back(p[2]);
        q3.push_back(p[3]);
    }
    CHECK(std::fabs(mean_se(mid).mean) < 3.0 * 0.5 / std::sqrt(double(n)));
    auto var = [](const std::vector<double>& x) {
        std::vector<double> sq;
        for (double v : x) sq.push_back(v * v);
        return mean_se(sq);
    };
    for (auto [x, target] : {std::pair{&q1, 0.1875}, {&mid, 0.25}, {&q3, 0.1875}}) {
        const auto v = var(*x);
        CHECK(std::fabs(v.mean - target) < 3.0 * v.std_error);
    }
}

TEST_CASE("excursion endpoints and positivity") {
    int strictly_positive = 0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        const auto p = sample_brownian_excursion(1024, Seed{5, 0, i});
        REQUIRE(p[0] == 0.0);
        REQUIRE(p[p.n()] == 0.0);
        const auto& v = p.values();
        REQUIRE(*std::min_element(v.begin(), v.end()) >= 0.0);
        strictly_positive += std::all_of(v.begin() + 1, v.end() - 1, [](double x) { return x > 0.0; }) ? 1 : 0;
    }
    CHECK(strictly_positive >= 198);
}

TEST_CASE("excursion law is reversible") {
    std::vector<double> fwd, rev;
    for (std::uint64_t i = 0; i < 4000; ++i) {
        const auto p = sample_brownian_excursion(512, Seed{6, 0, i});
        fwd.push_back(p[p.n() / 4]);
        const auto q = sample_brownian_excursion(512, Seed{6, 1, i});
        rev.push_back(q[3 * q.n() / 4]);
    }
    CHECK(ks_two_sample(fwd, rev) < ks_critical(4000, 4000, 0.001));
}

TEST_CASE("Bessel(3): starts at 0, E R(1)^2 = 3") {
    const int n = 20000;
    std::vector<double> r2;
    for (int i = 0; i < n; ++i) {
        const auto p = sample_bessel3(8, 1.0, Seed{2, 0, std::uint64_t(i)});
        REQUIRE(p[0] == 0.0);
        r2.push_back(p[8] * p[8]);
    }
    const auto m = mean_se(r2);
    CHECK(std::fabs(m.mean - 3.0) < 3.0 * m.std_error);
    CHECK_THROWS_AS(sample_bessel3(8, 0.0, Seed{}), std::invalid_argument);
}

TEST_CASE("offspring law is a critical probability law") {
    for (double beta : {1.2, 1.5, 1.8, 2.0}) {
        OffspringLaw law(beta);
        double mass = 0.0, mean = 0.0;
        for (std::uint64_t k = 0; k < 200000; ++k) {
            mass += law.pmf(k);
            mean += double(k) * law.pmf(k);
        }
        CHECK(law.pmf(1) == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(law.tail(0) == doctest::Approx(1.0));
        if (beta == 2.0) {
            CHECK(law.pmf(0) == doctest::Approx(0.5));
            CHECK(law.pmf(2) == doctest::Approx(0.5));
            CHECK(mean == doctest::Approx(1.0));
        }
    }
    CHECK_THROWS_AS(OffspringLaw(2.5), std::invalid_argument);
}

TEST_CASE("height process of a small tree") {
    // root with children a, b; a has one child c... depth-first: root, a, c, b
    const std::vector<std::uint32_t> offspring{2, 1, 0, 0};
    CHECK(height_process(offspring) == std::vector<std::uint32_t>{0, 1, 2, 1});
}

TEST_CASE("conditioned trees have the requested size") {
    Rng rng(Seed{4, 0, 0});
    for (double beta : {1.5, 2.0}) {
        const std::size_t n = feasible_tree_size(beta, 1000);
        const auto off = sample_conditioned_offspring(beta, n, rng);
        REQUIRE(off.size() == n);
        CHECK(std::accumulate(off.begin(), off.end(), std::uint64_t(0)) == n - 1);
    }
}

TEST_CASE("stable excursion: endpoints, determinism, domain") {
    ExcursionSpec spec{1.5, 2048, Seed{8, 0, 0}};
    const auto a = sample_stable_excursion(spec);
    const auto b = sample_stable_excursion(spec);
    CHECK(a.values() == b.values());
    CHECK(a[0] == 0.0);
    CHECK(a[a.n()] == 0.0);
    CHECK(a.t1() == doctest::Approx(1.0));
    spec.beta = 0.9;
    CHECK_THROWS_AS(sample_stable_excursion(spec), std::invalid_argument);
}

TEST_CASE("GW excursion at beta = 2 matches the Brownian maximum law") {
    std::vector<double> gw, bm;
    for (std::uint64_t i = 0; i < 2000; ++i) {
        const auto p = sample_stable_excursion({2.0, 4096, Seed{10, 0, i}});
        gw.push_back(*std::max_element(p.values().begin(), p.values().end()));
        const auto q = sample_brownian_excursion(4096, Seed{10, 1, i});
        bm.push_back(*std::max_element(q.values().begin(), q.values().end()));
    }
    CHECK(ks_two_sample(gw, bm) < ks_critical(2000, 2000, 0.001));
}

TEST_CASE("flip at the maximum of a tent") {
    const auto o = flip_at_max(test::tent());
    CHECK(o.t0() == doctest::Approx(-0.5));
    CHECK(o.t1() == doctest::Approx(0.5));
    CHECK(o.eval(0.0) == 0.0);
    CHECK(o.eval(-0.5) == 1.0);
    CHECK(o.eval(0.5) == 1.0);
}

TEST_CASE("flip preserves the maximum") {
    const auto p = sample_brownian_excursion(256, Seed{11, 0, 0});
    const auto o = flip_at_max(p);
    const double top = *std::max_element(p.values().begin(), p.values().end());
    CHECK(std::max(o[0], o[o.n()]) == doctest::Approx(top));
    CHECK(*std::min_element(o.values().begin(), o.values().end()) == 0.0);
}
