#include <doctest.h>

#include <cmath>

#include "fragsim/limits.hpp"
#include "fragsim/stats.hpp"
#include "helpers.hpp"

using namespace fragsim;

namespace {

HInfinitySample v_shape() {
    HInfinitySample s;
    s.path = test::make_path(-2.0, 1.0, {2.0, 1.0, 0.0, 1.0, 2.0}, PathKind::h_infinity);
    return s;
}

}  // namespace

TEST_CASE("V shape") {
    const auto s = v_shape();
    const auto e = eta_at(s, 1.0);
    CHECK(e.eta_minus == 1.0);
    CHECK(e.eta_plus == 1.0);
    CHECK(eta_at(s, 0.5).eta_plus <= eta_at(s, 1.5).eta_plus);
    const auto f = limit_fragmentation(s);
    CHECK(f.set.intervals == std::vector<Interval>{{-1.0, 1.0}});
    CHECK(f.masses.masses == std::vector<double>{2.0});
    CHECK_THROWS_AS(eta_at(s, 3.0), DomainExceeded);
}

TEST_CASE("Brownian H_infinity: origin, monotone eta, determinism") {
    const auto a = sample_h_infinity_brownian(3.0, 1024, Seed{1, 0, 0});
    const auto b = sample_h_infinity_brownian(3.0, 1024, Seed{1, 0, 0});
    CHECK(a.path.values() == b.path.values());
    CHECK(a.path.eval(0.0) == 0.0);
    for (const auto* curve : {&a.eta_minus, &a.eta_plus})
        for (std::size_t i = 1; i < curve->size(); ++i) CHECK((*curve)[i].value >= (*curve)[i - 1].value);
    CHECK_THROWS_AS(sample_h_infinity_brownian(-1.0, 1024, Seed{}), std::invalid_argument);
}

TEST_CASE("Brownian H_infinity: completion keeps the level-1 set inside the domain") {
    BrownianHInfinityOptions o;
    o.complete_level = 1.0;
    for (std::uint64_t i = 0; i < 50; ++i) {
        const auto s = sample_h_infinity_brownian(1.0, 512, Seed{2, 0, i}, o);
        const auto f = limit_fragmentation(s);
        CHECK(f.set.contains(0.0));
        CHECK(f.masses[0] >= f.set.intervals[std::size_t(f.set.component_of(0.0))].length());
    }
}

TEST_CASE("Brownian H_infinity: symmetry and self-similarity in law") {
    const int n = 2000;
    std::vector<double> left, right, at1, at4;
    for (int i = 0; i < n; ++i) {
        const auto s = sample_h_infinity_brownian(4.0, 1024, Seed{3, 0, std::uint64_t(i)});
        left.push_back(s.path.eval(-1.0));
        right.push_back(s.path.eval(1.0));
        at4.push_back(0.5 * s.path.eval(4.0));
        const auto u = sample_h_infinity_brownian(4.0, 1024, Seed{3, 1, std::uint64_t(i)});
        at1.push_back(u.path.eval(1.0));
    }
    CHECK(ks_two_sample(left, right) < ks_critical(n, n, 0.001));
    CHECK(ks_two_sample(at4, at1) < ks_critical(n, n, 0.001));
}

TEST_CASE("Brownian H_infinity drifts to infinity") {
    auto frac_above = [](double L) {
        int above = 0;
        for (std::uint64_t i = 0; i < 200; ++i) {
            const auto s = sample_h_infinity_brownian(L, 2048, Seed{4, std::uint64_t(L), i});
            double lo = 1e300;
            for (std::size_t k = 0; k <= s.path.n(); ++k)
                if (std::fabs(s.path.x(k)) >= L / 2.0) lo = std::min(lo, s.path[k]);
            above += lo > 1.0 ? 1 : 0;
        }
        return above / 200.0;
    };
    const double f10 = frac_above(10.0), f40 = frac_above(40.0);
    CHECK(f40 >= f10);
    CHECK(f40 > 0.8);
}

TEST_CASE("stable eta: structure") {
    const StableExcursionBank bank(1.5, 32, 1024, Seed{5, 0, 0});
    const auto e = sample_stable_eta(1.5, 4.0, 1e-3, bank, Seed{5, 1, 0});
    CHECK(!e.degenerate);
    double prev = 0.0;
    for (double m = 0.0; m <= 4.0; m += 0.05) {
        const double v = e.eta(m);
        CHECK(v >= prev);
        CHECK(v == doctest::Approx(e.eta_minus(m) + e.eta_plus(m)));
        prev = v;
    }
    const auto again = sample_stable_eta(1.5, 4.0, 1e-3, bank, Seed{5, 1, 0});
    CHECK(again.eta(1.0) == e.eta(1.0));
    CHECK_THROWS_AS(sample_stable_eta(2.5, 4.0, 1e-3, bank, Seed{}), std::invalid_argument);
}

TEST_CASE("stable H_infinity path starts at 0") {
    const StableExcursionBank bank(1.5, 32, 1024, Seed{6, 0, 0});
    const auto s = sample_h_infinity_stable(1.5, 2.0, 1e-2, 4096, Seed{6, 1, 0}, bank);
    CHECK(s.path.eval(0.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.truncation.m_cap == 2.0);
}
