#pragma once

#include <cstdint>
#include <vector>

#include "fragsim/path.hpp"
#include "fragsim/rng.hpp"

namespace fragsim {

SampledPath sample_brownian_bridge(std::size_t grid_n, const Seed& seed);

// Standard excursion via Vervaat rotation of a grid bridge at its leftmost argmin.
SampledPath sample_brownian_excursion(std::size_t grid_n, const Seed& seed);

// Norm of a 3-d Brownian motion on [0, horizon_T], started at the origin.
SampledPath sample_bessel3(std::size_t grid_n, double horizon_T, const Seed& seed);

// Same, started at distance r0 from the origin, with grid step dt.
std::vector<double> bessel3_values(std::size_t steps, double dt, double r0, Rng& rng);

// Offspring law with generating function s + (1-s)^beta / beta.
struct OffspringLaw {
    double beta;
    explicit OffspringLaw(double beta);
    double pmf(std::uint64_t k) const;
    // P(xi >= k).
    double tail(std::uint64_t k) const;
};

// Smallest size >= n that a tree with this offspring law can have.
std::size_t feasible_tree_size(double beta, std::size_t n);

// Offspring sequence of a GW tree conditioned on exactly n vertices, in
// depth-first order (the Lukasiewicz walk has steps xi - 1).
std::vector<std::uint32_t> sample_conditioned_offspring(double beta, std::size_t n, Rng& rng);

// Heights of the vertices in depth-first order.
std::vector<std::uint32_t> height_process(const std::vector<std::uint32_t>& offspring);

// Factor turning GW generations into the continuum height normalization
// psi(lambda) = lambda^beta; for beta = 2 the standard-excursion convention.
double stable_height_scale(double beta, std::size_t n);

SampledPath sample_stable_excursion(const ExcursionSpec& spec);

// o(t) = max(path) - path(x_max + t) on [-x_max, length - x_max].
SampledPath flip_at_max(const SampledPath& path);

// Leftmost grid argmax.
std::size_t argmax_index(const SampledPath& path);

}  // namespace fragsim
