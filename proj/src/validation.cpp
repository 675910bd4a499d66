#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fragsim/analytics.hpp"
#include "fragsim/harness.hpp"
#include "fragsim/metrics.hpp"
#include "fragsim/paths.hpp"

namespace fragsim {

namespace {

constexpr double nan_t = std::numeric_limits<double>::quiet_NaN();

std::string num(double x) { return Json(x).dump(); }

double quad(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

// E[g(zeta)] for the Kennedy law.
double kennedy_expect(const std::function<double(double)>& g) {
    auto f = [&](double x) { return g(x) * kennedy_density(x); };
    return quad(f, 0.02, 1.0) + quad(f, 1.0, 12.0);
}

void analytics_checks(ExperimentReport& r) {
    const auto& c = r.config;
    auto exact = [&](const std::string& name, double est, double target, double tol) {
        r.checks.push_back(make_check(name, nan_t, Rule::range, est - target, 0.0, 0, 0.0, tol, -tol, tol));
    };

    for (double q : {0.5, 1.0, 2.0, 5.0, 10.0})
        exact("phi_nu_vs_closed_form(" + num(q) + ")", phi_from_nu_brownian(q), phi_closed_form(-0.5, q), 1e-8);

    for (double beta : {1.2, 1.3, 1.5, 1.8, 1.95}) {
        const auto a = stable_constants(beta);
        const auto b = stable_constants_alpha_form(1.0 / beta - 1.0);
        double worst = 0.0;
        for (auto [x, y] : {std::pair{a.c_beta, b.c_beta}, {a.kappa, b.kappa}, {a.atom_rate, b.atom_rate}})
            worst = std::max(worst, std::fabs(x - y) / std::fabs(x));
        exact("stable_constants_two_forms(" + num(beta) + ")", worst, 0.0, 1e-12);
    }

    double worst_completeness = 0.0;
    for (double t = 0.5; t <= 4.0; t *= 1.05)
        worst_completeness = std::max(worst_completeness, std::fabs(kennedy_tail(t) + kennedy_cdf(t) - 1.0));
    exact("kennedy_tail_plus_cdf", worst_completeness, 0.0, 1e-12);
    exact("kennedy_total_mass", kennedy_expect([](double) { return 1.0; }), 1.0, 1e-10);
    const double mean = kennedy_moment(1.0);
    exact("kennedy_mean", mean, std::sqrt(M_PI / 2.0), 1e-9);

    // Size bias of power 1: E f(zeta_*) E zeta = E zeta f(zeta).
    const double m2 = kennedy_moment(2.0);
    exact("size_bias_identity_x", kennedy_expect([](double x) { return x * x; }), m2, 1e-8);
    exact("size_bias_identity_exp", kennedy_expect([](double x) { return x * std::exp(-x); }),
          mean * kennedy_expect([&](double x) { return x * std::exp(-x) / mean; }), 1e-8);
    exact("size_bias_mean_T", kennedy_expect([](double x) { return 1.0 / x; }) / mean, 2.0 / 3.0, 1e-8);
    for (double lam : c.lambdas) {
        if (lam == 0.0) continue;
        const double est = kennedy_expect([lam](double x) { return x * std::exp(-lam / (x * x)); }) / mean;
        exact("size_bias_laplace_T(" + num(lam) + ")", est, laplace_last_fragment_brownian(lam), 1e-8);
    }

    for (double alpha : {-0.45, -0.4, -0.34}) {
        std::vector<double> grid;
        for (int i = 0; i < 64; ++i) grid.push_back(10.0 * i / 63.0);
        const auto table = solve_phi_fixed_point(alpha, grid, 1e-9, 500);
        const std::string tag = "(" + num(alpha) + ")";
        r.checks.push_back(make_check("phi_residual" + tag, nan_t, Rule::below, table.residual, 0.0, grid.size(),
                                      1e-6, 0.0));
        exact("phi_at_zero" + tag, table.values.front(), 1.0, 0.0);
        double rise = 0.0;
        for (std::size_t i = 1; i < table.values.size(); ++i)
            rise = std::max(rise, table.values[i] - table.values[i - 1]);
        exact("phi_non_increasing" + tag, rise, 0.0, 0.0);
        double worst = 0.0;
        for (double lam : {0.5, 1.0, 2.0, 5.0})
            worst = std::max(worst, std::fabs(phi_rhs_r_quadrature(table, lam) - table(lam)));
        exact("phi_r_quadrature" + tag, worst, 0.0, 1e-5);
    }

    std::uint64_t sub = 0;
    for (double beta : {1.3, 1.5, 1.8})
        for (double q : {1.0, 2.0}) {
            auto f = [q](const RankedMasses& s) {
                double v = 1.0;
                for (double x : s.masses) v -= std::pow(x, 1.0 + q);
                return v;
            };
            const auto est = stable_dislocation_expectation(beta, f, 100000, 1e-4, Seed{c.seed, 40, sub++});
            r.checks.push_back(make_check("stable_phi_mc(" + num(beta) + "," + num(q) + ")", nan_t, Rule::both_3se_rel,
                                          est.value, est.std_error, est.n, phi_closed_form(1.0 / beta - 1.0, q), 0.05));
        }
}

// ---- metrics ----

OpenSet random_open_set(Rng& rng, double lo, double hi) {
    const int k = 1 + int(rng.uniform() * 10.0);
    std::vector<double> pts;
    for (int i = 0; i < 2 * k; ++i) pts.push_back(lo + (hi - lo) * rng.uniform());
    std::sort(pts.begin(), pts.end());
    OpenSet s;
    for (int i = 0; i < k; ++i)
        if (pts[2 * i] < pts[2 * i + 1]) s.intervals.push_back({pts[2 * i], pts[2 * i + 1]});
    return s;
}

RankedMasses random_ranked(Rng& rng) {
    RankedMasses m;
    const int k = 1 + int(rng.uniform() * 8.0);
    for (int i = 0; i < k; ++i) m.masses.push_back(rng.uniform());
    std::sort(m.masses.rbegin(), m.masses.rend());
    return m;
}

ClosedSet closed(std::vector<Interval> iv) { return ClosedSet{std::move(iv)}; }

// Random piecewise-linear f with f(0) = 0 and f -> infinity, sampled on a grid
// together with f + eps g for a smooth bounded g.
struct Family {
    std::vector<double> knots_x, knots_y;
    double a = 1.0, b = 0.0;

    double f(double x) const {
        if (x <= knots_x.front()) return knots_y.front() + 2.0 * (knots_x.front() - x);
        if (x >= knots_x.back()) return knots_y.back() + 2.0 * (x - knots_x.back());
        const auto it = std::upper_bound(knots_x.begin(), knots_x.end(), x);
        const std::size_t j = std::size_t(it - knots_x.begin());
        const double w = (x - knots_x[j - 1]) / (knots_x[j] - knots_x[j - 1]);
        return knots_y[j - 1] + w * (knots_y[j] - knots_y[j - 1]);
    }
    double g(double x) const { return 0.5 * std::sin(a * x + b); }
};

Family random_family(Rng& rng) {
    Family fam;
    fam.a = 0.5 + 3.0 * rng.uniform();
    fam.b = 2.0 * M_PI * rng.uniform();
    // Knots on the half-integers of [-4, 4]; values kept away from level 1.
    for (int i = -8; i <= 8; ++i) {
        const double x = 0.5 * i;
        double y = i == 0 ? 0.0 : (std::fabs(x) < 3.0 ? 2.2 * rng.uniform() : 1.5 + rng.uniform());
        if (std::fabs(y - 1.0) < 0.1) y += 0.25;
        fam.knots_x.push_back(x);
        fam.knots_y.push_back(y);
    }
    return fam;
}

SampledPath tabulate(const std::function<double(double)>& h, double lo, double hi, std::size_t n) {
    std::vector<double> v(n + 1);
    const double dt = (hi - lo) / double(n);
    for (std::size_t k = 0; k <= n; ++k) v[k] = h(lo + dt * double(k));
    PathMeta meta;
    meta.kind = PathKind::generic;
    return SampledPath(lo, dt, std::move(v), meta);
}

double leb_in(const OpenSet& s, double k) {
    double total = 0.0;
    for (const auto& iv : s.intervals) total += std::max(0.0, std::min(iv.b, k) - std::max(iv.a, -k));
    return total;
}

void metrics_checks(ExperimentReport& r) {
    const auto& c = r.config;
    Rng rng(Seed{c.seed, 50, 0});

    double chi_excess = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < 1000; ++s) {
        const auto set = random_open_set(rng, -5.0, 5.0);
        for (int p = 0; p < 1000; ++p) {
            const double x = -6.0 + 12.0 * rng.uniform(), y = -6.0 + 12.0 * rng.uniform();
            chi_excess = std::max(chi_excess, std::fabs(chi(set, x) - chi(set, y)) - std::fabs(x - y));
        }
    }
    r.checks.push_back(make_check("chi_lipschitz_max_excess", nan_t, Rule::below, chi_excess, 0.0, 1000000, 1e-12, 0.0));

    std::uint64_t asym = 0, tri = 0, tri_ranked = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto a = random_open_set(rng, -5.0, 5.0), b = random_open_set(rng, -5.0, 5.0),
                   e = random_open_set(rng, -5.0, 5.0);
        const auto ab = d_open(a, b), ba = d_open(b, a), be = d_open(b, e), ae = d_open(a, e);
        if (ab.value != ba.value) ++asym;
        if (ae.value > ab.value + be.value + ab.error_bound + be.error_bound + ae.error_bound) ++tri;
        const auto x = random_ranked(rng), y = random_ranked(rng), z = random_ranked(rng);
        if (d_ranked(x, z) > d_ranked(x, y) + d_ranked(y, z) + 1e-12) ++tri_ranked;
    }
    auto zero_count = [&](const std::string& name, std::uint64_t count, std::uint64_t n) {
        r.checks.push_back(make_check(name, nan_t, Rule::range, double(count), 0.0, n, 0.0, 0.0, 0.0, 0.0));
    };
    zero_count("d_open_symmetry_violations", asym, 1000);
    zero_count("d_open_triangle_violations", tri, 1000);
    zero_count("d_ranked_triangle_violations", tri_ranked, 1000);

    const double h1 = hausdorff(closed({{0.0, 1.0}}), closed({{0.0, 1.0}, {3.0, 3.0}}));
    const double h2 = hausdorff(closed({{-1.0, -1.0}}), closed({{2.0, 2.5}}));
    const double h3 = hausdorff(closed({{0.0, 0.0}, {4.0, 4.0}}), closed({{0.0, 4.0}}));
    r.checks.push_back(make_check("hausdorff_examples", nan_t, Rule::range,
                                  std::fabs(h1 - 2.0) + std::fabs(h2 - 3.5) + std::fabs(h3 - 2.0), 0.0, 3, 0.0, 0.0,
                                  0.0, 1e-15));

    // f_n = f + g/n: d_open({f_n < 1}, {f < 1}) and the Lebesgue gap on
    // [-K, K] shrink to zero along n.
    constexpr double lo = -8.0, hi = 8.0, K = 8.0;
    constexpr std::size_t cells = 16000;
    constexpr int families = 50, steps = 50;
    int transfer_ok = 0, leb_ok = 0;
    double worst_d = 0.0, worst_leb = 0.0;
    for (int fi = 0; fi < families; ++fi) {
        const auto fam = random_family(rng);
        const auto base = sublevel_set(tabulate([&](double x) { return fam.f(x); }, lo, hi, cells), 1.0);
        std::vector<double> d(steps), leb(steps);
        for (int n = 1; n <= steps; ++n) {
            const double eps = 1.0 / n;
            const auto pert = sublevel_set(
                tabulate([&](double x) { return fam.f(x) + eps * fam.g(x); }, lo, hi, cells), 1.0);
            d[n - 1] = d_open(pert, base).value;
            leb[n - 1] = std::fabs(leb_in(pert, K) - leb_in(base, K));
        }
        // Tail envelope e_n = sup_{m >= n}: a gap of order 1/n must bring e_50
        // well under e_5.
        auto envelope_ok = [](std::vector<double> v) {
            for (int i = int(v.size()) - 2; i >= 0; --i) v[i] = std::max(v[i], v[i + 1]);
            return v.back() <= std::max(0.3 * v[4], 1e-3);
        };
        transfer_ok += envelope_ok(d) ? 1 : 0;
        leb_ok += envelope_ok(leb) ? 1 : 0;
        worst_d = std::max(worst_d, d.back());
        worst_leb = std::max(worst_leb, leb.back());
    }
    r.statistics.push_back({"convergence_transfer_worst_d_at_n50", nan_t, worst_d, 0.0, families});
    r.statistics.push_back({"lebesgue_worst_gap_at_n50", nan_t, worst_leb, 0.0, families});
    r.checks.push_back(make_check("convergence_transfer_families", nan_t, Rule::range, transfer_ok, 0.0, families,
                                  families, 0.0, families, families));
    r.checks.push_back(make_check("lebesgue_convergence_families", nan_t, Rule::range, leb_ok, 0.0, families,
                                  families, 0.0, families, families));
}

}  // namespace

ExperimentReport run_validation_suite(const ExperimentConfig& config) {
    if (config.experiment != ExperimentKind::validation)
        throw std::invalid_argument("run_validation_suite: experiment is not validation");
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    ExperimentReport r;
    r.config = config;
    if (config.suite != "metrics") analytics_checks(r);
    if (config.suite != "analytics") metrics_checks(r);
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!config.out_path.empty()) write_text(config.out_path, to_json(r).dump(2) + "\n");
    return r;
}

}  // namespace fragsim
