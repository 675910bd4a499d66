#include "fragsim/path.hpp"

#include <cmath>

namespace fragsim {

const char* to_string(PathKind kind) {
    switch (kind) {
        case PathKind::excursion: return "excursion";
        case PathKind::bessel3: return "bessel3";
        case PathKind::h_infinity: return "h_infinity";
        case PathKind::generic: return "generic";
    }
    return "generic";
}

PathKind path_kind_from_string(const std::string& s) {
    if (s == "excursion") return PathKind::excursion;
    if (s == "bessel3") return PathKind::bessel3;
    if (s == "h_infinity") return PathKind::h_infinity;
    if (s == "generic") return PathKind::generic;
    throw std::invalid_argument("unknown path kind: " + s);
}

SampledPath::SampledPath(double t0, double dt, std::vector<double> values, PathMeta meta)
    : t0_(t0), dt_(dt), values_(std::move(values)), meta_(meta) {
    if (values_.size() < 2) throw std::invalid_argument("SampledPath: fewer than 2 values");
    if (!(dt_ > 0.0)) throw std::invalid_argument("SampledPath: dt <= 0");
}

double SampledPath::eval(double x) const {
    const double u = (x - t0_) / dt_;
    const double last = double(n());
    if (u < 0.0 || u > last) {
        if (meta_.kind == PathKind::excursion) return 0.0;
        return u < 0.0 ? values_.front() : values_.back();
    }
    std::size_t k = std::size_t(std::floor(u));
    if (k >= n()) k = n() - 1;
    const double f = u - double(k);
    return values_[k] + f * (values_[k + 1] - values_[k]);
}

}  // namespace fragsim
