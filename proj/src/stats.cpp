#include "fragsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fragsim {

MeanSe mean_se(const std::vector<double>& x) {
    MeanSe r;
    r.n = x.size();
    if (x.empty()) return r;
    r.mean = std::accumulate(x.begin(), x.end(), 0.0) / double(x.size());
    if (x.size() < 2) return r;
    double ss = 0.0;
    for (double v : x) ss += (v - r.mean) * (v - r.mean);
    r.std_error = std::sqrt(ss / double(x.size() - 1) / double(x.size()));
    return r;
}

namespace {

double order_stat(const std::vector<double>& s, double pos) {
    pos = std::clamp(pos, 0.0, double(s.size() - 1));
    const auto k = std::size_t(std::floor(pos));
    if (k + 1 >= s.size()) return s.back();
    return s[k] + (pos - double(k)) * (s[k + 1] - s[k]);
}

}  // namespace

MeanSe quantile_se(std::vector<double> x, double p) {
    if (x.empty()) throw std::invalid_argument("quantile_se: empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile_se: p outside [0,1]");
    std::sort(x.begin(), x.end());
    const double n = double(x.size());
    const double pos = p * (n - 1.0);
    const double spread = std::sqrt(n * p * (1.0 - p));
    MeanSe r;
    r.n = x.size();
    r.mean = order_stat(x, pos);
    r.std_error = 0.5 * (order_stat(x, pos + spread) - order_stat(x, pos - spread));
    return r;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    const std::vector<double> wb(b.size(), 1.0);
    return ks_weighted(std::move(a), b, wb);
}

double ks_weighted(std::vector<double> a, const std::vector<double>& b, const std::vector<double>& wb) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks: empty sample");
    if (wb.size() != b.size()) throw std::invalid_argument("ks: weight count mismatch");
    std::sort(a.begin(), a.end());
    std::vector<std::size_t> idx(b.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return b[i] < b[j]; });
    const double wsum = std::accumulate(wb.begin(), wb.end(), 0.0);
    if (!(wsum > 0.0)) throw std::invalid_argument("ks: weights sum to zero");
    std::size_t i = 0, j = 0;
    double fb = 0.0, d = 0.0;
    while (i < a.size() && j < idx.size()) {
        const double x = std::min(a[i], b[idx[j]]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < idx.size() && b[idx[j]] <= x) fb += wb[idx[j++]];
        d = std::max(d, std::fabs(double(i) / double(a.size()) - fb / wsum));
    }
    return d;
}

double ks_null_sd(std::size_t n1, std::size_t n2) {
    return 0.2603 * std::sqrt(double(n1 + n2) / (double(n1) * double(n2)));
}

double ks_critical(std::size_t n1, std::size_t n2, double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("ks_critical: p outside (0,1)");
    return std::sqrt(-0.5 * std::log(0.5 * p)) * std::sqrt(double(n1 + n2) / (double(n1) * double(n2)));
}

}  // namespace fragsim
