#include "fragsim/refine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fragsim {

double bridge_max(double a, double b, double dx, double u) {
    const double d = a - b;
    return 0.5 * (a + b + std::sqrt(d * d - 2.0 * dx * std::log(u)));
}

double bridge_min(double a, double b, double dx, double u) {
    const double d = a - b;
    return 0.5 * (a + b - std::sqrt(d * d - 2.0 * dx * std::log(u)));
}

BridgeExtrema sample_bridge_extrema(const SampledPath& path, Rng& rng) {
    const std::size_t n = path.n();
    const double dx = path.dt();
    BridgeExtrema ext;
    ext.cell_min.resize(n);
    ext.cell_max.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        ext.cell_max[k] = bridge_max(path[k], path[k + 1], dx, rng.uniform());
        ext.cell_min[k] = bridge_min(path[k], path[k + 1], dx, rng.uniform());
    }
    return ext;
}

namespace {

// Extremum order inside cell k: a rising cell dips first, a falling cell peaks first.
bool min_first(const SampledPath& path, std::size_t k) { return path[k] <= path[k + 1]; }

}  // namespace

SampledPath refined_path(const SampledPath& path, const BridgeExtrema& ext) {
    const std::size_t n = path.n();
    if (ext.cell_min.size() != n || ext.cell_max.size() != n)
        throw std::invalid_argument("refined_path: extrema do not match the grid");
    std::vector<double> v;
    v.reserve(3 * n + 1);
    for (std::size_t k = 0; k < n; ++k) {
        v.push_back(path[k]);
        if (min_first(path, k)) {
            v.push_back(ext.cell_min[k]);
            v.push_back(ext.cell_max[k]);
        } else {
            v.push_back(ext.cell_max[k]);
            v.push_back(ext.cell_min[k]);
        }
    }
    v.push_back(path[n]);
    return SampledPath(path.t0(), path.dt() / 3.0, std::move(v), path.meta());
}

OpenSet bridge_level_set(const SampledPath& path, const BridgeExtrema& ext, double level) {
    return level_set(refined_path(path, ext), level);
}

OpenSet bridge_sublevel_set(const SampledPath& path, const BridgeExtrema& ext, double level) {
    return sublevel_set(refined_path(path, ext), level);
}

RefinedExtinction refined_extinction(const SampledPath& path, const BridgeExtrema& ext) {
    const auto it = std::max_element(ext.cell_max.begin(), ext.cell_max.end());
    RefinedExtinction r;
    r.cell = std::size_t(it - ext.cell_max.begin());
    r.zeta = *it;
    r.x_star = path.x(r.cell) + (min_first(path, r.cell) ? 2.0 : 1.0) * path.dt() / 3.0;
    return r;
}

}  // namespace fragsim
