#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fragsim/rng.hpp"

namespace fragsim {

enum class PathKind { excursion, bessel3, h_infinity, generic };

const char* to_string(PathKind kind);
PathKind path_kind_from_string(const std::string& s);

struct PathMeta {
    double beta = 2.0;
    PathKind kind = PathKind::generic;
    std::uint64_t seed = 0;
};

// Continuous function on [t0, t0 + n*dt], linear between grid points.
class SampledPath {
public:
    SampledPath() = default;
    SampledPath(double t0, double dt, std::vector<double> values, PathMeta meta);

    double t0() const { return t0_; }
    double dt() const { return dt_; }
    std::size_t n() const { return values_.size() - 1; }
    double t1() const { return t0_ + double(n()) * dt_; }
    double x(std::size_t k) const { return t0_ + double(k) * dt_; }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t k) const { return values_[k]; }
    const PathMeta& meta() const { return meta_; }

    // Linear interpolation; excursions vanish off their domain.
    double eval(double x) const;

private:
    double t0_ = 0.0;
    double dt_ = 1.0;
    std::vector<double> values_{0.0, 0.0};
    PathMeta meta_{};
};

struct ExcursionSpec {
    double beta = 2.0;
    std::size_t grid_n = 1024;
    Seed seed{};
};

class DomainExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fragsim
