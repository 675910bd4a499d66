#include <doctest.h>

#include <cmath>

#include "fragsim/metrics.hpp"
#include "fragsim/rng.hpp"

using namespace fragsim;

namespace {

OpenSet random_set(Rng& rng) {
    const int k = 1 + int(rng.uniform() * 6.0);
    std::vector<double> pts;
    for (int i = 0; i < 2 * k; ++i) pts.push_back(-4.0 + 8.0 * rng.uniform());
    std::sort(pts.begin(), pts.end());
    OpenSet s;
    for (int i = 0; i < k; ++i) s.intervals.push_back({pts[2 * i], pts[2 * i + 1]});
    return s;
}

}  // namespace

TEST_CASE("chi examples") {
    const OpenSet unit{{{0.0, 1.0}}};
    CHECK(chi(unit, 0.5) == 0.5);
    CHECK(chi(unit, 0.25) == 0.25);
    CHECK(chi(unit, 1.5) == 0.0);
    CHECK(chi(unit, 1.0) == 0.0);
    CHECK(chi(OpenSet{}, 0.0) == 0.0);
}

TEST_CASE("Hausdorff examples") {
    const ClosedSet a{{{0.0, 1.0}}};
    CHECK(hausdorff(a, a) == 0.0);
    CHECK(hausdorff(a, ClosedSet{{{0.0, 2.0}}}) == 1.0);
    CHECK(hausdorff(ClosedSet{{{0.0, 0.0}}}, ClosedSet{{{3.0, 3.0}}}) == 3.0);
    CHECK(distance_to(a, 2.5) == 1.5);
    CHECK(distance_to(a, 0.5) == 0.0);
}

TEST_CASE("clipped complement") {
    const auto c = clipped_complement(OpenSet{{{-1.0, 1.0}}}, 1.0);
    REQUIRE(c.intervals.size() == 2);
    CHECK(c.intervals[0] == Interval{-1.0, -1.0});
    CHECK(c.intervals[1] == Interval{1.0, 1.0});
    CHECK(clipped_complement(OpenSet{}, 2.0).intervals == std::vector<Interval>{{-2.0, 2.0}});
}

TEST_CASE("d_open examples") {
    const OpenSet a{{{-1.0, 1.0}}};
    const auto self = d_open(a, a);
    CHECK(self.value == 0.0);
    CHECK(self.error_bound > 0.0);
    // k = 1: {-1, 1} against [-1, 1] is at distance 1.
    const auto d = d_open(a, OpenSet{}, 1);
    CHECK(d.value == doctest::Approx(0.5));
    double tail = 0.0;
    for (int k = 2; k < 200; ++k) tail += std::ldexp(2.0 * k, -k);
    CHECK(d.error_bound == doctest::Approx(tail));
    CHECK(d_open(a, OpenSet{}, 32).error_bound < 1e-7);
}

TEST_CASE("d_ranked examples") {
    const RankedMasses s{{0.5, 0.3}}, t{{0.5, 0.2, 0.1}};
    CHECK(d_ranked(s, t) == doctest::Approx(0.2));
    CHECK(d_ranked(s, s) == 0.0);
    CHECK(d_ranked(RankedMasses{}, t) == doctest::Approx(0.8));
}

TEST_CASE("chi is 1-Lipschitz") {
    Rng rng(Seed{1, 0, 0});
    for (int s = 0; s < 200; ++s) {
        const auto set = random_set(rng);
        for (int p = 0; p < 200; ++p) {
            const double x = -5.0 + 10.0 * rng.uniform(), y = -5.0 + 10.0 * rng.uniform();
            REQUIRE(std::fabs(chi(set, x) - chi(set, y)) <= std::fabs(x - y));
        }
    }
}

TEST_CASE("d_open and d_ranked are pseudometrics") {
    Rng rng(Seed{2, 0, 0});
    for (int i = 0; i < 300; ++i) {
        const auto a = random_set(rng), b = random_set(rng), c = random_set(rng);
        const auto ab = d_open(a, b), ba = d_open(b, a), bc = d_open(b, c), ac = d_open(a, c);
        REQUIRE(ab.value == ba.value);
        REQUIRE(ab.value >= 0.0);
        REQUIRE(ac.value <= ab.value + bc.value + ab.error_bound + bc.error_bound + ac.error_bound);
        RankedMasses x, y, z;
        for (int k = 0; k < 5; ++k) {
            x.masses.push_back(rng.uniform());
            y.masses.push_back(rng.uniform());
            z.masses.push_back(rng.uniform());
        }
        for (auto* m : {&x, &y, &z}) std::sort(m->masses.rbegin(), m->masses.rend());
        REQUIRE(d_ranked(x, z) <= d_ranked(x, y) + d_ranked(y, z) + 1e-12);
    }
}

TEST_CASE("shrinking a component moves d_open continuously") {
    const OpenSet a{{{-1.0, 1.0}}};
    double prev = 1e9;
    for (int n = 1; n <= 20; ++n) {
        const double e = 0.5 / n;
        const double d = d_open(a, OpenSet{{{-1.0 + e, 1.0 - e}}}).value;
        CHECK(d < prev);
        CHECK(d <= e);
        prev = d;
    }
}
