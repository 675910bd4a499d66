#pragma once

#include <cstdint>
#include <vector>

#include "fragsim/fragmentation.hpp"
#include "fragsim/path.hpp"
#include "fragsim/rng.hpp"

namespace fragsim {

// Atom of the Poisson measure driving the stable construction: split v,
// local time r, level t.
struct PoissonAtom {
    double v = 0.0;
    double r = 0.0;
    double t = 0.0;
};

struct EtaPoint {
    double m = 0.0;
    double value = 0.0;
};

struct Truncation {
    double m_cap = 0.0;
    double r_min = 0.0;
};

struct HInfinitySample {
    SampledPath path;  // kind h_infinity, path(0) = 0
    std::vector<EtaPoint> eta_minus;
    std::vector<EtaPoint> eta_plus;
    Truncation truncation;
    std::vector<PoissonAtom> atoms;  // stable case, sorted by t
    bool degenerate = false;         // stable case with no retained atom
};

struct BrownianHInfinityOptions {
    // If positive, each side is continued past L until it sits above this
    // level for good; returns below it are spliced in at the level.
    double complete_level = 0.0;
    std::size_t eta_levels = 256;
};

// R_+ on [0, L] and R_- on [-L, 0], two independent Bes(3) paths, grid_n
// cells per side.
HInfinitySample sample_h_infinity_brownian(double L, std::size_t grid_n, const Seed& seed,
                                           const BrownianHInfinityOptions& opts = {});

// Normalized stable excursions reused as sub-excursion shapes.
class StableExcursionBank {
public:
    StableExcursionBank(double beta, std::size_t size, std::size_t grid_n, const Seed& seed);

    double beta() const { return beta_; }
    std::size_t size() const { return paths_.size(); }
    const SampledPath& path(std::size_t i) const { return paths_[i]; }
    double zeta(std::size_t i) const { return zeta_[i]; }
    double mean_inverse_zeta() const { return mean_inv_zeta_; }

private:
    double beta_;
    std::vector<SampledPath> paths_;
    std::vector<double> zeta_;
    double mean_inv_zeta_ = 0.0;
};

struct StableHInfinityOptions {
    // Sub-excursions at level t with lifetime below sigma_frac t^{beta/(beta-1)}
    // enter by their mean.
    double sigma_frac = 1e-4;
};

// Structural passage levels of the stable construction, no path rendering.
struct StableEta {
    std::vector<PoissonAtom> atoms;
    std::vector<double> left, right;  // contribution of each atom to eta_-, eta_+
    std::vector<double> dust_table;   // dust() on a uniform grid over [0, m_cap]
    bool degenerate = false;
    Truncation truncation;
    double beta = 1.5;

    // Mean contribution of atoms below r_min to eta(m), both sides together.
    double dust(double m) const;
    double eta_minus(double m) const;
    double eta_plus(double m) const;
    double eta(double m) const { return eta_minus(m) + eta_plus(m); }

    struct SubExcursion {
        std::size_t atom;
        bool left;
        double position;  // local-time coordinate along the atom's side
        double sigma;
        std::size_t bank_index;
    };
    std::vector<SubExcursion> explicit_subs;
    std::vector<double> atom_dust_left, atom_dust_right;
};

StableEta sample_stable_eta(double beta, double m_cap, double r_min, const StableExcursionBank& bank,
                            const Seed& seed, const StableHInfinityOptions& opts = {});

HInfinitySample sample_h_infinity_stable(double beta, double m_cap, double r_min, std::size_t grid_n,
                                         const Seed& seed, const StableExcursionBank& bank,
                                         const StableHInfinityOptions& opts = {});

// Builds a default bank (512 excursions at 2^12) from the seed.
HInfinitySample sample_h_infinity_stable(double beta, double m_cap, double r_min, std::size_t grid_n,
                                         const Seed& seed);

struct EtaPair {
    double eta_minus;
    double eta_plus;
};

// First passages above m on the interpolant, to the left and right of 0.
// Throws DomainExceeded if a side never passes m.
EtaPair eta_at(const HInfinitySample& sample, double m);

struct LimitFragmentation {
    OpenSet set;
    RankedMasses masses;
};

// {x : H(x) < 1} and its ranked lengths. Throws DomainExceeded if the set
// reaches the edge of the sampled domain.
LimitFragmentation limit_fragmentation(const HInfinitySample& sample);

}  // namespace fragsim
