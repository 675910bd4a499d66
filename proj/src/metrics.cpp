#include "fragsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <stdexcept>

namespace fragsim {

double chi(const OpenSet& set, double x) {
    const long i = set.component_of(x);
    if (i < 0) return 0.0;
    const auto& iv = set.intervals[std::size_t(i)];
    return std::min(x - iv.a, iv.b - x);
}

double distance_to(const ClosedSet& set, double x) {
    if (set.empty()) throw std::invalid_argument("distance_to: empty set");
    const auto& iv = set.intervals;
    auto it = std::lower_bound(iv.begin(), iv.end(), x, [](const Interval& v, double y) { return v.b < y; });
    double d = std::numeric_limits<double>::infinity();
    if (it != iv.end()) d = it->a <= x ? 0.0 : it->a - x;
    if (it != iv.begin()) d = std::min(d, x - std::prev(it)->b);
    return d;
}

namespace {

// sup over A of the distance to B. The distance is piecewise linear, so the
// sup over an interval of A sits at its endpoints or at a gap midpoint of B.
double directed(const ClosedSet& a, const ClosedSet& b) {
    double h = 0.0;
    const auto& bi = b.intervals;
    for (const auto& iv : a.intervals) {
        h = std::max({h, distance_to(b, iv.a), distance_to(b, iv.b)});
        auto it = std::lower_bound(bi.begin(), bi.end(), iv.a, [](const Interval& v, double y) { return v.b < y; });
        if (it != bi.begin()) --it;
        for (; it != bi.end() && it->b < iv.b; ++it) {
            auto next = std::next(it);
            if (next == bi.end()) break;
            const double mid = 0.5 * (it->b + next->a);
            if (mid > iv.a && mid < iv.b) h = std::max(h, 0.5 * (next->a - it->b));
        }
    }
    return h;
}

}  // namespace

double hausdorff(const ClosedSet& a, const ClosedSet& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("hausdorff: empty set");
    return std::max(directed(a, b), directed(b, a));
}

ClosedSet clipped_complement(const OpenSet& set, double k) {
    ClosedSet out;
    double cursor = -k;
    for (const auto& iv : set.intervals) {
        const double a = std::max(iv.a, -k), b = std::min(iv.b, k);
        if (!(a < b)) continue;
        if (a >= cursor) out.intervals.push_back({cursor, a});
        cursor = b;
    }
    if (cursor <= k) out.intervals.push_back({cursor, k});
    return out;
}

TruncatedDistance d_open(const OpenSet& a, const OpenSet& b, int k_max) {
    if (k_max < 1) throw std::invalid_argument("d_open: k_max < 1");
    TruncatedDistance r;
    double w = 1.0;
    for (int k = 1; k <= k_max; ++k) {
        w *= 0.5;
        const auto ca = clipped_complement(a, k), cb = clipped_complement(b, k);
        double h = 0.0;
        if (ca.empty() != cb.empty()) h = 2.0 * k;
        else if (!ca.empty()) h = hausdorff(ca, cb);
        r.value += w * h;
    }
    // sum_{k>n} k 2^{-k} = (n + 2) 2^{-n}.
    r.error_bound = 2.0 * (k_max + 2) * std::ldexp(1.0, -k_max);
    return r;
}

double d_ranked(const RankedMasses& s, const RankedMasses& t) {
    const std::size_t n = std::max(s.size(), t.size());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) d += std::fabs(s[i] - t[i]);
    return d;
}

}  // namespace fragsim
