#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fragsim/fragmentation.hpp"
#include "fragsim/rng.hpp"

namespace fragsim {

// ---- Brownian extinction time (maximum of the standard excursion) ----

// P(zeta > t) from the series sum_{n>=1} 2(4t^2n^2 - 1) exp(-2t^2n^2).
// Returns 1 for t <= 0.
double kennedy_tail(double t);

// P(zeta <= t) from the theta-transformed series, accurate for small t.
double kennedy_cdf(double t);

double kennedy_density(double t);

// E[zeta^p] by quadrature.
double kennedy_moment(double p);

double kennedy_sample(Rng& rng);
double kennedy_sample(const Seed& seed);

// Sample of the law E[zeta^power f(zeta)] / E[zeta^power] by rejection from
// the Kennedy law. power = -1/alpha - 1, so power = 1 in the Brownian case.
double size_biased_sample(double power, Rng& rng);
double size_biased_sample(double power, const Seed& seed);

// ---- Excursion measure of the stable height process, psi(l) = l^beta ----

double excursion_tail_hmax(double beta, double m);
double excursion_tail_sigma(double beta, double m);

// Constants of the Poisson construction of H_infinity.
struct StableConstants {
    double beta;
    double alpha;
    double c_beta;     // N(H_max > t) = c_beta t^{1/(1-beta)}
    double kappa;      // N(H_max in dt) = kappa t^{1/alpha} dt
    double atom_rate;  // intensity atom_rate exp(-r N(H_max > t)) r^{-beta} dr dt dv
};

StableConstants stable_constants(double beta);
// Same constants written in terms of alpha = 1/beta - 1.
StableConstants stable_constants_alpha_form(double alpha);

// ---- Dislocation measures and Laplace exponents ----

// Density of the larger fragment for the Brownian fragmentation, on [1/2, 1).
double brownian_dislocation_density(double x);

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t n = 0;
};

using RankedFunctional = std::function<double(const RankedMasses&)>;

// int f dnu for the stable dislocation measure, through the jumps of a stable
// subordinator of index 1/beta on [0,1]. Jumps below jump_eps enter T_1 by
// their mean. The first two jump arrival times are importance sampled.
McEstimate stable_dislocation_expectation(double beta, const RankedFunctional& f, std::uint64_t n_mc,
                                          double jump_eps, const Seed& seed);

// phi(q) = Gamma(q - alpha) / ((1 + alpha) Gamma(q)).
double phi_closed_form(double alpha, double q);

// Which excursion normalization the Brownian dislocation measure refers to.
// The density above is written for the standard excursion; the height process
// of psi(l) = l^2 is sqrt(2) times it, which divides the measure by sqrt(2).
enum class Normalization { height_process, standard_excursion };

// int (1 - x^{1+q} - (1-x)^{1+q}) nu(dx) by adaptive quadrature.
double phi_from_nu_brownian(double q, Normalization norm = Normalization::height_process);

double laplace_last_fragment_brownian(double lambda);
double laplace_total_mass_brownian(double lambda);

// ---- Fixed-point equation for Phi(lambda) = E exp(-lambda eta(1)) ----

struct PhiTable {
    double alpha = -0.4;
    std::vector<double> lambdas;
    std::vector<double> values;
    double residual = 0.0;
    int iterations = 0;
    // Solver knots (0, then geometric up to 4 max(lambdas)) and log Phi there.
    std::vector<double> knots;
    std::vector<double> log_knots;

    // Interpolates log Phi between knots, extrapolates linearly past the last.
    double operator()(double lambda) const;
    double log_value(double lambda) const;
};

struct PhiSolverOptions {
    int knots_per_decade = 200;  // geometric solver knots
    int gl_points = 8;           // Gauss-Legendre nodes per knot interval
    double initial_rate = 1.0;
};

class PhiNonConvergence : public std::runtime_error {
public:
    PhiNonConvergence(const std::string& what, double residual)
        : std::runtime_error(what), residual(residual) {}
    double residual;
};

PhiTable solve_phi_fixed_point(double alpha, const std::vector<double>& lambda_grid, double tol, int max_iter,
                               const PhiSolverOptions& opts = {});

// sup over the table's grid of |Phi - RHS(Phi)|, with RHS evaluated by the
// given quadrature resolution.
double phi_fixed_point_residual(const PhiTable& table, const PhiSolverOptions& opts);

// E[eta(1)^p], 0 < p < 1, from the table.
double phi_eta_moment(const PhiTable& table, double p);

// RHS(Phi)(lambda) with the r-integral done by quadrature instead of in
// closed form.
double phi_rhs_r_quadrature(const PhiTable& table, double lambda);

// E[eta(1)] = -Phi'(0), from the table's slope at the origin.
double phi_eta_mean(const PhiTable& table);

// E[1/zeta] for the normalized stable excursion, beta in (1,2). Counting the
// lifetime of sub-excursions per unit local time in two ways gives
// E[1/zeta] = kappa (beta-1) Gamma(1-1/beta) E[eta(1)].
double stable_inverse_max_mean(double beta);

}  // namespace fragsim
