#pragma once

#include <utility>
#include <vector>

#include "fragsim/path.hpp"

namespace fragsim {

struct Interval {
    double a = 0.0;
    double b = 0.0;
    double length() const { return b - a; }
    bool contains(double x) const { return a < x && x < b; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

// Bounded open subset of the line: sorted disjoint open intervals. Two
// components may share an endpoint (where the path touches the level).
struct OpenSet {
    std::vector<Interval> intervals;

    bool empty() const { return intervals.empty(); }
    double total_length() const;
    bool contains(double x) const;
    // Index of the component containing x, or -1.
    long component_of(double x) const;
    bool valid() const;
    friend bool operator==(const OpenSet&, const OpenSet&) = default;
};

// Non-increasing sequence of non-negative masses.
struct RankedMasses {
    std::vector<double> masses;

    double sum() const;
    double operator[](std::size_t i) const { return i < masses.size() ? masses[i] : 0.0; }
    std::size_t size() const { return masses.size(); }
    friend bool operator==(const RankedMasses&, const RankedMasses&) = default;
};

// {x : path(x) > level} for the linear interpolant.
OpenSet level_set(const SampledPath& path, double level);

// {x : path(x) < level} inside the path's domain.
OpenSet sublevel_set(const SampledPath& path, double level);

RankedMasses ranked_lengths(const OpenSet& set);

struct Extinction {
    double zeta;
    double x_star;
};

Extinction extinction(const SampledPath& path);

struct LastFragment {
    Interval interval;
    double length;
};

// Component of level_set(path, t) containing the leftmost argmax.
LastFragment last_fragment(const SampledPath& path, double t);

// F_*((zeta - t)^+), with value 0 once t >= zeta (and at t = 0, where the
// level set is empty).
double last_fragment_near_extinction(const SampledPath& path, double t);

// t^{1/alpha} (O((zeta - t)^+) - x_star).
OpenSet rescaled_snapshot(const SampledPath& path, double t, double alpha);

double tagged_fragment(const SampledPath& path, double u, double t);

std::vector<RankedMasses> fragmentation_trajectory(const SampledPath& path, const std::vector<double>& levels);

}  // namespace fragsim
