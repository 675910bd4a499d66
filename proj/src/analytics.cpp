#include "fragsim/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/random/gamma_distribution.hpp>

namespace fragsim {

namespace {

constexpr double pi = 3.14159265358979323846;

template <class F>
double gk(F f, double a, double b, double tol = 1e-14) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, tol);
}

// Small-argument form of the Kennedy CDF: sqrt(2 pi) pi^2 t^{-3} sum k^2 e^{-pi^2 k^2 / (2t^2)}.
double kennedy_cdf_theta(double t) {
    const double c = pi * pi / (2.0 * t * t);
    double s = 0.0;
    for (int k = 1; k < 1000; ++k) {
        const double kk = double(k) * double(k);
        const double term = kk * std::exp(-c * kk);
        s += term;
        if (term < 1e-18 * s || term == 0.0) break;
    }
    return std::sqrt(2.0 * pi) * pi * pi * s / (t * t * t);
}

}  // namespace

double kennedy_tail(double t) {
    if (!(t > 0.0)) return 1.0;
    // Below 1/2 the alternating series loses the tail to rounding; the theta
    // form converges fast there.
    if (t < 0.5) return 1.0 - std::clamp(kennedy_cdf_theta(t), 0.0, 1.0);
    const double t2 = t * t;
    double s = 0.0;
    for (int n = 1; n < 100000; ++n) {
        const double a = 2.0 * t2 * double(n) * double(n);
        const double term = 2.0 * (2.0 * a - 1.0) * std::exp(-a);
        s += term;
        if (a > 1.0 && std::fabs(term) < 1e-16) break;
    }
    return std::clamp(s, 0.0, 1.0);
}

double kennedy_cdf(double t) {
    if (!(t > 0.0)) return 0.0;
    return std::clamp(kennedy_cdf_theta(t), 0.0, 1.0);
}

double kennedy_density(double t) {
    if (!(t > 0.0)) return 0.0;
    const double t2 = t * t;
    double s = 0.0;
    if (t < 1.0) {
        const double c = pi * pi / (2.0 * t2);
        for (int k = 1; k < 1000; ++k) {
            const double kk = double(k) * double(k);
            const double term = kk * (pi * pi * kk - 3.0 * t2) * std::exp(-c * kk);
            s += term;
            if (std::fabs(term) < 1e-18 * std::fabs(s) || term == 0.0) break;
        }
        return std::sqrt(2.0 * pi) * pi * pi * s / (t2 * t2 * t2);
    }
    for (int n = 1; n < 100000; ++n) {
        const double nn = double(n) * double(n);
        const double a = 2.0 * t2 * nn;
        const double term = 8.0 * t * nn * (2.0 * a - 3.0) * std::exp(-a);
        s += term;
        if (a > 2.0 && std::fabs(term) < 1e-18) break;
    }
    return s;
}

double kennedy_moment(double p) {
    auto f = [p](double x) { return std::pow(x, p) * kennedy_density(x); };
    return gk(f, 0.02, 1.0) + gk(f, 1.0, 10.0);
}

double kennedy_sample(Rng& rng) {
    const double u = rng.uniform();
    double lo = 0.0, hi = 10.0;
    auto cdf = [](double x) { return x < 1.0 ? kennedy_cdf(x) : 1.0 - kennedy_tail(x); };
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid) < u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double kennedy_sample(const Seed& seed) {
    Rng rng(seed);
    return kennedy_sample(rng);
}

double size_biased_sample(double power, Rng& rng) {
    if (!(power >= 0.0 && power <= 8.0))
        throw std::invalid_argument("size_biased_sample: only powers in [0, 8] of the Kennedy law are supported");
    // P(zeta > 4.4) < 1e-16; beyond the envelope point samples are kept as is.
    constexpr double cap = 4.4;
    for (;;) {
        const double z = kennedy_sample(rng);
        if (power == 0.0 || z >= cap) return z;
        if (rng.uniform() < std::pow(z / cap, power)) return z;
    }
}

double size_biased_sample(double power, const Seed& seed) {
    Rng rng(seed);
    return size_biased_sample(power, rng);
}

namespace {

void check_beta(double beta, const char* who) {
    if (!(beta > 1.0 && beta <= 2.0)) throw std::invalid_argument(std::string(who) + ": beta outside (1,2]");
}

}  // namespace

double excursion_tail_hmax(double beta, double m) {
    check_beta(beta, "excursion_tail_hmax");
    if (!(m > 0.0)) throw std::invalid_argument("excursion_tail_hmax: m <= 0");
    const double e = 1.0 / (1.0 - beta);
    return std::pow(beta - 1.0, e) * std::pow(m, e);
}

double excursion_tail_sigma(double beta, double m) {
    check_beta(beta, "excursion_tail_sigma");
    if (!(m > 0.0)) throw std::invalid_argument("excursion_tail_sigma: m <= 0");
    return std::pow(m, -1.0 / beta) / std::tgamma(1.0 - 1.0 / beta);
}

StableConstants stable_constants(double beta) {
    if (!(beta > 1.0 && beta < 2.0)) throw std::invalid_argument("stable_constants: beta outside (1,2)");
    StableConstants k{};
    k.beta = beta;
    k.alpha = 1.0 / beta - 1.0;
    k.c_beta = std::pow(beta - 1.0, 1.0 / (1.0 - beta));
    k.kappa = std::pow(beta - 1.0, beta / (1.0 - beta));
    k.atom_rate = beta * (beta - 1.0) / std::tgamma(2.0 - beta);
    return k;
}

StableConstants stable_constants_alpha_form(double alpha) {
    if (!(alpha > -0.5 && alpha < 0.0)) throw std::invalid_argument("stable_constants_alpha_form: alpha outside (-1/2,0)");
    const double ratio = -alpha / (1.0 + alpha);
    StableConstants k{};
    k.alpha = alpha;
    k.beta = 1.0 / (1.0 + alpha);
    k.c_beta = std::pow(ratio, (1.0 + alpha) / alpha);
    k.kappa = std::pow(ratio, 1.0 / alpha);
    k.atom_rate = ratio / ((1.0 + alpha) * std::tgamma((1.0 + 2.0 * alpha) / (1.0 + alpha)));
    return k;
}

double brownian_dislocation_density(double x) {
    if (!(x >= 0.5 && x < 1.0)) return 0.0;
    const double y = 1.0 - x;
    return 2.0 / std::sqrt(2.0 * pi * x * x * x * y * y * y);
}

McEstimate stable_dislocation_expectation(double beta, const RankedFunctional& f, std::uint64_t n_mc,
                                          double jump_eps, const Seed& seed) {
    if (!(beta > 1.0 && beta < 2.0))
        throw std::invalid_argument("stable_dislocation_expectation: beta outside (1,2)");
    if (!(jump_eps > 0.0)) throw std::invalid_argument("stable_dislocation_expectation: jump_eps <= 0");
    if (n_mc < 2) throw std::invalid_argument("stable_dislocation_expectation: n_mc < 2");
    const double a = 1.0 / beta;
    const double g = std::tgamma(1.0 - a);
    const double small_mean = std::pow(jump_eps, 1.0 - a) / ((beta - 1.0) * g);
    const double prefactor = beta * (beta - 1.0) * g / std::tgamma(2.0 - beta);
    const double arrival_max = std::pow(jump_eps, -a) / g;
    auto jump = [&](double arrival) { return std::pow(g * arrival, -beta); };

    // Proposal for the second arrival: half Gamma(2,1), half density (2-beta) x^{1-beta} on (0,1].
    constexpr double p_gamma = 0.5;
    Rng rng(seed);
    boost::random::gamma_distribution<double> gamma2(2.0);
    double sum = 0.0, sum2 = 0.0;
    RankedMasses masses;
    for (std::uint64_t i = 0; i < n_mc; ++i) {
        const double g2 = rng.uniform() < p_gamma ? gamma2(rng) : std::pow(rng.uniform(), 1.0 / (2.0 - beta));
        const double proposal = p_gamma * g2 * std::exp(-g2) +
                                (g2 <= 1.0 ? (1.0 - p_gamma) * (2.0 - beta) * std::pow(g2, 1.0 - beta) : 0.0);
        const double weight = g2 * std::exp(-g2) / proposal;
        const double g1 = rng.uniform() * g2;
        masses.masses.clear();
        double total = small_mean;
        for (double arrival : {g1, g2}) {
            if (arrival <= arrival_max) {
                masses.masses.push_back(jump(arrival));
                total += masses.masses.back();
            }
        }
        for (double arrival = g2 - std::log(rng.uniform()); arrival <= arrival_max;
             arrival -= std::log(rng.uniform())) {
            masses.masses.push_back(jump(arrival));
            total += masses.masses.back();
        }
        for (double& m : masses.masses) m /= total;
        const double v = weight * total * f(masses);
        sum += v;
        sum2 += v * v;
    }
    const double n = double(n_mc);
    const double mean = sum / n;
    const double var = std::max(sum2 / n - mean * mean, 0.0) * n / (n - 1.0);
    return {prefactor * mean, prefactor * std::sqrt(var / n), n_mc};
}

double phi_closed_form(double alpha, double q) {
    if (!(q > 0.0)) throw std::invalid_argument("phi_closed_form: q <= 0");
    if (!(alpha >= -0.5 && alpha < 0.0)) throw std::invalid_argument("phi_closed_form: alpha outside [-1/2,0)");
    return std::exp(std::lgamma(q - alpha) - std::lgamma(q)) / (1.0 + alpha);
}

double phi_from_nu_brownian(double q, Normalization norm) {
    if (!(q > 0.0)) throw std::invalid_argument("phi_from_nu_brownian: q <= 0");
    // x = 1 - u^2 removes the (1-x)^{-3/2} endpoint singularity.
    auto h = [q](double u) {
        if (u == 0.0) return 4.0 / std::sqrt(2.0 * pi) * (1.0 + q);
        const double u2 = u * u;
        const double x = 1.0 - u2;
        const double head = -std::expm1((1.0 + q) * std::log1p(-u2)) / u2;
        const double tail = std::pow(u, 2.0 * q);
        return 4.0 / std::sqrt(2.0 * pi) * std::pow(x, -1.5) * (head - tail);
    };
    const double v = gk(h, 0.0, std::sqrt(0.5), 1e-15);
    return norm == Normalization::height_process ? v / std::sqrt(2.0) : v;
}

double laplace_last_fragment_brownian(double lambda) {
    if (!(lambda > 0.0)) return 1.0;
    const double u = std::sqrt(2.0 * lambda);
    if (u < 1e-6) return 1.0 - u * u / 3.0;
    const double s = std::sinh(u);
    return 2.0 * lambda / (s * s);
}

double laplace_total_mass_brownian(double lambda) {
    if (!(lambda > 0.0)) return 1.0;
    const double c = std::cosh(std::sqrt(2.0 * lambda));
    return 1.0 / (c * c);
}

}  // namespace fragsim
