#pragma once

#include <vector>

#include "fragsim/fragmentation.hpp"

namespace fragsim {

// Distance from x to the complement of the set; 0 off the set.
double chi(const OpenSet& set, double x);

// Compact subset of the line as sorted, disjoint closed intervals [a, b]
// with a <= b (a == b is a single point).
struct ClosedSet {
    std::vector<Interval> intervals;
    bool empty() const { return intervals.empty(); }
};

// Distance from x to a non-empty closed set.
double distance_to(const ClosedSet& set, double x);

double hausdorff(const ClosedSet& a, const ClosedSet& b);

// [-k, k] minus (A intersected with (-k, k)).
ClosedSet clipped_complement(const OpenSet& set, double k);

struct TruncatedDistance {
    double value = 0.0;
    double error_bound = 0.0;
};

// sum_{k=1}^{k_max} 2^{-k} d_H of the clipped complements, with the bound
// sum_{k > k_max} 2^{-k} 2k on the rest. An empty clipped complement is at
// distance 2k from a non-empty one.
TruncatedDistance d_open(const OpenSet& a, const OpenSet& b, int k_max = 32);

// l1 distance, shorter sequence padded with zeros.
double d_ranked(const RankedMasses& s, const RankedMasses& t);

}  // namespace fragsim
