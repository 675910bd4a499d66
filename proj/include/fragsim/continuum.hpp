#pragma once

#include <cstddef>
#include <vector>

#include "fragsim/fragmentation.hpp"
#include "fragsim/rng.hpp"

namespace fragsim {

// Continuum samplers for the stable case, beta in (1,2), built directly on
// the Poisson structure of H_infinity instead of a discrete tree.
//
// Truncation shared by both samplers: at spine level t, atoms with local
// time below rho s^{1/(beta-1)} (s the distance to the nearest level of
// interest, floored) and sub-excursions lower than sub_frac t enter eta by
// their means.

struct EtaBankOptions {
    std::size_t size = 8192;
    int generations = 24;
    double rho = 1e-3;
    double t_floor = 1e-3;
    double sub_frac = 0.2;
};

// Samples of eta(1) by population dynamics: each generation redraws eta(1)
// with sub-excursion lengths H^{-1/alpha} eta' taken from the previous one,
// then rescales so that E eta^{1/beta} = 1 / (kappa (beta-1) Gamma(1-1/beta)),
// which pins the scale the recursion leaves free.
class EtaBank {
public:
    EtaBank(double beta, const Seed& seed, const EtaBankOptions& opts = {});

    double beta() const { return beta_; }
    std::size_t size() const { return samples_.size(); }
    const std::vector<double>& samples() const { return samples_; }
    double mean() const { return mean_; }
    double min() const { return min_; }
    double max() const { return max_; }
    double draw(Rng& rng) const;
    // Empirical E exp(-lambda eta(1)).
    double laplace(double lambda) const;
    const EtaBankOptions& options() const { return opts_; }

private:
    double beta_;
    EtaBankOptions opts_;
    std::vector<double> samples_;
    double mean_ = 0.0, min_ = 0.0, max_ = 0.0;
};

// E eta(1)^{1/beta} fixed by the lifetime tail of the excursion measure.
double eta_moment_target(double beta);

struct NearMaxOptions {
    double rho = 1e-3;
    double sub_frac = 0.2;
    // Sub-excursions lower than resolution * min(t) are not resolved into
    // separate blocks.
    double resolution = 0.2;
    int max_tries = 100000;
};

struct NearMaxSample {
    double zeta = 0.0;   // maximum of the normalized excursion
    double sigma = 0.0;  // lifetime before normalization, in [1, 2)
    std::vector<RankedMasses> fragments;  // F((zeta - t)^+) for each t
    std::vector<double> last_fragment;    // F_*((zeta - t)^+) for each t
    int tries = 0;
};

// Blocks of the normalized stable excursion near its maximum, at depths
// t_list below it. The excursion is read from its maximum by the Williams
// decomposition: H_max is drawn from N(H_max in dh), the lifetime eta(H_max)
// is built, and the draw is kept when it falls in [1, 2), which after
// rescaling gives the normalized law.
NearMaxSample sample_stable_near_max(const std::vector<double>& t_list, const EtaBank& bank, const Seed& seed,
                                     const NearMaxOptions& opts = {});

// Maximum of the normalized excursion alone.
double sample_stable_excursion_max(const EtaBank& bank, const Seed& seed);

struct StableLimitOptions {
    double cap = 200.0;  // spine levels above cap are ignored
    double rho = 1e-3;
    double sub_frac = 0.2;
    double resolution = 0.2;
};

// Ranked blocks of {H_infinity < 1}, the limit F_infinity.
RankedMasses stable_limit_fragmentation(const EtaBank& bank, const Seed& seed, const StableLimitOptions& opts = {});

}  // namespace fragsim
