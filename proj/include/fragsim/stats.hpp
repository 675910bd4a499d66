#pragma once

#include <cstddef>
#include <vector>

namespace fragsim {

struct MeanSe {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

MeanSe mean_se(const std::vector<double>& x);

// Quantile by linear interpolation of the order statistics, with a standard
// error from the binomial spread of the order statistics around it.
MeanSe quantile_se(std::vector<double> x, double p);

// Two-sample Kolmogorov-Smirnov distance between empirical CDFs.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Same with weights on the second sample.
double ks_weighted(std::vector<double> a, const std::vector<double>& b, const std::vector<double>& wb);

// Standard deviation of the two-sample KS statistic under equal laws.
double ks_null_sd(std::size_t n1, std::size_t n2);

// Asymptotic critical value of the two-sample KS statistic at level p.
double ks_critical(std::size_t n1, std::size_t n2, double p);

}  // namespace fragsim
