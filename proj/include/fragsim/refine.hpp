#pragma once

#include <cstddef>
#include <vector>

#include "fragsim/fragmentation.hpp"
#include "fragsim/path.hpp"
#include "fragsim/rng.hpp"

namespace fragsim {

// Continuous-path corrections for Brownian-type paths sampled on a grid.
// Given the grid values, each cell is a Brownian bridge; its minimum and
// maximum are drawn once so that all levels queried on the same path agree.

// Maximum and minimum of a bridge from a to b over a time span dx with unit
// variance rate, from a uniform u in (0,1).
double bridge_max(double a, double b, double dx, double u);
double bridge_min(double a, double b, double dx, double u);

struct BridgeExtrema {
    std::vector<double> cell_min, cell_max;  // cell k spans grid points k, k+1
};

BridgeExtrema sample_bridge_extrema(const SampledPath& path, Rng& rng);

// The grid path with the bridge extrema of each cell inserted as two extra
// knots, at a third and two thirds of the cell: a rising cell takes its
// minimum first, a falling cell its maximum. Level sets of this single
// function are nested in the level and agree with the sampled extrema.
SampledPath refined_path(const SampledPath& path, const BridgeExtrema& ext);

// level_set and sublevel_set of refined_path(path, ext).
OpenSet bridge_level_set(const SampledPath& path, const BridgeExtrema& ext, double level);
OpenSet bridge_sublevel_set(const SampledPath& path, const BridgeExtrema& ext, double level);

struct RefinedExtinction {
    double zeta = 0.0;
    double x_star = 0.0;  // knot of the maximum in refined_path
    std::size_t cell = 0;
};

RefinedExtinction refined_extinction(const SampledPath& path, const BridgeExtrema& ext);

}  // namespace fragsim
