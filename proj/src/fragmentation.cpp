#include "fragsim/fragmentation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "fragsim/paths.hpp"

namespace fragsim {

double OpenSet::total_length() const {
    double s = 0.0;
    for (const auto& iv : intervals) s += iv.length();
    return s;
}

long OpenSet::component_of(double x) const {
    auto it = std::upper_bound(intervals.begin(), intervals.end(), x,
                               [](double v, const Interval& iv) { return v < iv.b; });
    if (it != intervals.end() && it->contains(x)) return long(it - intervals.begin());
    return -1;
}

bool OpenSet::contains(double x) const { return component_of(x) >= 0; }

bool OpenSet::valid() const {
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        if (!(intervals[i].a < intervals[i].b)) return false;
        if (i > 0 && intervals[i - 1].b > intervals[i].a) return false;
    }
    return true;
}

double RankedMasses::sum() const {
    double s = 0.0;
    for (double m : masses) s += m;
    return s;
}

namespace {

// Components of {x : sign * (v(x) - level) > 0} for the interpolant of v.
OpenSet strict_set(const SampledPath& path, double level, double sign) {
    OpenSet out;
    const auto& v = path.values();
    const std::size_t n = path.n();
    const double dt = path.dt();
    auto above = [&](double y) { return sign * (y - level) > 0.0; };
    bool open = above(v[0]);
    double start = path.t0();
    for (std::size_t k = 0; k < n; ++k) {
        const double a = v[k], b = v[k + 1];
        const bool na = above(b);
        if (open && !na) {
            const double frac = (a - level) / (a - b);
            const double end = path.x(k) + dt * frac;
            if (end > start) out.intervals.push_back({start, end});
            open = false;
        } else if (!open && na) {
            const double frac = (level - a) / (b - a);
            start = path.x(k) + dt * frac;
            open = true;
        }
    }
    if (open && path.t1() > start) out.intervals.push_back({start, path.t1()});
    return out;
}

}  // namespace

OpenSet level_set(const SampledPath& path, double level) {
    return strict_set(path, level, 1.0);
}

OpenSet sublevel_set(const SampledPath& path, double level) {
    return strict_set(path, level, -1.0);
}

RankedMasses ranked_lengths(const OpenSet& set) {
    RankedMasses r;
    r.masses.reserve(set.intervals.size());
    for (const auto& iv : set.intervals) r.masses.push_back(iv.length());
    std::sort(r.masses.begin(), r.masses.end(), std::greater<>());
    return r;
}

Extinction extinction(const SampledPath& path) {
    const std::size_t k = argmax_index(path);
    return {path[k], path.x(k)};
}

LastFragment last_fragment(const SampledPath& path, double t) {
    const auto ex = extinction(path);
    if (!(t < ex.zeta)) throw std::out_of_range("last_fragment: level at or above the maximum");
    const auto set = level_set(path, t);
    const long i = set.component_of(ex.x_star);
    if (i < 0) {
        // Within rounding of the maximum the component can vanish.
        if (ex.zeta - t <= 1e-12 * std::max(1.0, std::fabs(ex.zeta))) return {{ex.x_star, ex.x_star}, 0.0};
        throw std::logic_error("last_fragment: argmax not covered");
    }
    const auto iv = set.intervals[std::size_t(i)];
    return {iv, iv.length()};
}

double last_fragment_near_extinction(const SampledPath& path, double t) {
    const auto ex = extinction(path);
    const double level = ex.zeta - t;
    if (t >= ex.zeta || !(level < ex.zeta)) return 0.0;
    return last_fragment(path, level).length;
}

OpenSet rescaled_snapshot(const SampledPath& path, double t, double alpha) {
    const auto ex = extinction(path);
    if (!(t < ex.zeta)) throw std::out_of_range("rescaled_snapshot: t at or above the maximum");
    if (!(t > 0.0)) throw std::invalid_argument("rescaled_snapshot: t <= 0");
    const double c = std::pow(t, 1.0 / alpha);
    auto set = level_set(path, ex.zeta - t);
    for (auto& iv : set.intervals) iv = {(iv.a - ex.x_star) * c, (iv.b - ex.x_star) * c};
    return set;
}

double tagged_fragment(const SampledPath& path, double u, double t) {
    const auto set = level_set(path, t);
    const long i = set.component_of(u);
    return i < 0 ? 0.0 : set.intervals[std::size_t(i)].length();
}

std::vector<RankedMasses> fragmentation_trajectory(const SampledPath& path, const std::vector<double>& levels) {
    if (!std::is_sorted(levels.begin(), levels.end()))
        throw std::invalid_argument("fragmentation_trajectory: levels not ascending");
    std::vector<RankedMasses> out;
    out.reserve(levels.size());
    for (double l : levels) out.push_back(ranked_lengths(level_set(path, l)));
    return out;
}

}  // namespace fragsim
