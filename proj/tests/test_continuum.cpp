#include <doctest.h>

#include <cmath>

#include "fragsim/analytics.hpp"
#include "fragsim/continuum.hpp"
#include "fragsim/stats.hpp"

using namespace fragsim;

namespace {

const EtaBank& bank() {
    static const EtaBank b = [] {
        EtaBankOptions o;
        o.size = 2048;
        o.generations = 12;
        return EtaBank(1.5, Seed{1, 0, 0}, o);
    }();
    return b;
}

}  // namespace

TEST_CASE("eta bank moments") {
    const auto& b = bank();
    CHECK(b.size() == 2048);
    CHECK(b.min() > 0.0);
    double m = 0.0;
    for (double e : b.samples()) m += std::pow(e, 1.0 / 1.5);
    CHECK(m / double(b.size()) == doctest::Approx(eta_moment_target(1.5)).epsilon(1e-9));
    const auto k = stable_constants(1.5);
    CHECK(eta_moment_target(1.5) ==
          doctest::Approx(1.0 / (k.kappa * 0.5 * std::tgamma(1.0 - 1.0 / 1.5))).epsilon(1e-12));
    const auto phi = solve_phi_fixed_point(-1.0 / 3.0, {0.0, 0.5, 1.0, 2.0}, 1e-10, 500);
    for (double lam : {0.5, 1.0, 2.0}) CHECK(std::fabs(b.laplace(lam) - phi(lam)) < 0.005);
    CHECK(b.mean() == doctest::Approx(phi_eta_mean(phi)).epsilon(0.05));
}

TEST_CASE("near-max sampler") {
    const std::vector<double> ts{0.1, 0.05};
    const auto a = sample_stable_near_max(ts, bank(), Seed{2, 0, 0});
    const auto b = sample_stable_near_max(ts, bank(), Seed{2, 0, 0});
    CHECK(a.zeta == b.zeta);
    CHECK(a.fragments == b.fragments);
    CHECK(a.sigma >= 1.0);
    CHECK(a.sigma < 2.0);
    for (std::uint64_t i = 0; i < 40; ++i) {
        const auto s = sample_stable_near_max(ts, bank(), Seed{2, 1, i});
        REQUIRE(s.fragments.size() == 2);
        for (std::size_t j = 0; j < ts.size(); ++j) {
            const auto& f = s.fragments[j];
            CHECK(f.sum() <= 1.0 + 1e-12);
            CHECK(std::is_sorted(f.masses.rbegin(), f.masses.rend()));
            CHECK(s.last_fragment[j] <= f[0]);
        }
        // Closer to the maximum, less mass.
        CHECK(s.fragments[1].sum() <= s.fragments[0].sum() + 1e-12);
    }
    CHECK_THROWS_AS(sample_stable_near_max({}, bank(), Seed{}), std::invalid_argument);
    CHECK_THROWS_AS(sample_stable_near_max({-0.1}, bank(), Seed{}), std::invalid_argument);
}

TEST_CASE("limit fragmentation at level 1") {
    const auto a = stable_limit_fragmentation(bank(), Seed{3, 0, 0});
    CHECK(a == stable_limit_fragmentation(bank(), Seed{3, 0, 0}));
    CHECK(std::is_sorted(a.masses.rbegin(), a.masses.rend()));
    CHECK(a[0] > 0.0);
}
