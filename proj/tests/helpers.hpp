#pragma once

#include <vector>

#include "fragsim/path.hpp"

namespace fragsim::test {

inline SampledPath make_path(double t0, double dt, std::vector<double> v, PathKind kind = PathKind::excursion) {
    PathMeta meta;
    meta.kind = kind;
    return SampledPath(t0, dt, std::move(v), meta);
}

// Tent on [0, 1] peaking at (0.5, 1).
inline SampledPath tent() { return make_path(0.0, 0.5, {0.0, 1.0, 0.0}); }

}  // namespace fragsim::test
