#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fragsim/analytics.hpp"

namespace fragsim {

// Solver for
//   -log Phi(lambda) = beta int_0^{lambda^{-alpha}} [(A(s) + G(s))^{beta-1} - A(s)^{beta-1}] ds,
//   A(s) = c_beta s^{1/(1-beta)},  G(s) = kappa int_0^s v^{1/alpha} (1 - Phi(v^{-1/alpha})) dv,
// which is the Poisson-atom representation of E exp(-lambda eta(1)) after the
// r-integral has been done in closed form.

namespace {

struct GaussLegendre {
    std::vector<double> x, w;  // on [-1, 1]
};

GaussLegendre gauss_legendre(int n) {
    GaussLegendre g;
    g.x.resize(std::size_t(n));
    g.w.resize(std::size_t(n));
    for (int i = 0; i < n; ++i) {
        double z = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::fabs(dz) < 1e-16) break;
        }
        g.x[std::size_t(i)] = z;
        g.w[std::size_t(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return g;
}

// log Phi on knots 0 = k_0 < k_1 < ... with k_1.. geometric. Linear in
// lambda on the first interval, cubic Lagrange in log lambda elsewhere, linear
// extrapolation past the last knot.
struct LogPhi {
    const std::vector<double>* knots;
    const std::vector<double>* logv;

    double operator()(double lambda) const {
        const auto& k = *knots;
        const auto& v = *logv;
        const std::size_t n = k.size();
        if (lambda <= 0.0) return 0.0;
        if (lambda <= k[1]) return v[1] * lambda / k[1];
        if (lambda >= k[n - 1]) {
            const double slope = (v[n - 1] - v[n - 2]) / (k[n - 1] - k[n - 2]);
            return v[n - 1] + slope * (lambda - k[n - 1]);
        }
        const double step = std::log(k[2] / k[1]);
        const double u = std::log(lambda / k[1]) / step;
        std::size_t i = 1 + std::size_t(std::max(0.0, std::floor(u)));
        if (i >= n - 1) i = n - 2;
        // Stencil i-1..i+2 clipped to [1, n-1].
        std::size_t lo = i > 1 ? i - 1 : 1;
        if (lo + 3 > n - 1) lo = n - 4;
        const double x = u + 1.0;  // position in knot-index units
        double acc = 0.0;
        for (std::size_t a = lo; a < lo + 4; ++a) {
            double w = 1.0;
            for (std::size_t b = lo; b < lo + 4; ++b)
                if (b != a) w *= (x - double(b)) / (double(a) - double(b));
            acc += w * v[a];
        }
        return acc;
    }
};

std::vector<double> geometric_knots(double lambda_max, int per_decade) {
    const double hi = std::max(4.0 * lambda_max, 1e6);
    const double lo = 1e-10 * lambda_max;
    const double ratio = std::pow(10.0, 1.0 / per_decade);
    const int count = int(std::ceil(std::log(hi / lo) / std::log(ratio)));
    std::vector<double> k{0.0};
    for (int i = 0; i <= count; ++i) k.push_back(lo * std::pow(ratio, i));
    return k;
}

class PhiOperator {
public:
    PhiOperator(double alpha, std::vector<double> knots, int gl_points)
        : k_(stable_constants(1.0 / (1.0 + alpha))), knots_(std::move(knots)), gl_(gauss_legendre(gl_points)) {
        const auto ka = stable_constants_alpha_form(alpha);
        auto close = [](double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(std::fabs(a), std::fabs(b)); };
        if (!close(ka.c_beta, k_.c_beta) || !close(ka.kappa, k_.kappa) || !close(ka.atom_rate, k_.atom_rate))
            throw std::logic_error("solve_phi_fixed_point: alpha-form and beta-form constants disagree");
        s_.resize(knots_.size());
        for (std::size_t j = 0; j < knots_.size(); ++j) s_[j] = std::pow(knots_[j], -k_.alpha);
    }

    // v^{1/alpha} (1 - Phi(v^{-1/alpha})).
    auto g_fn(const std::vector<double>& logv) const {
        const double a = k_.alpha;
        return [this, a, &logv](double v) {
            const double lam = std::pow(v, -1.0 / a);
            return -std::expm1(LogPhi{&knots_, &logv}(lam)) / lam;  // v^{1/alpha} = 1 / lam
        };
    }

    const std::vector<double>& knots() const { return knots_; }
    double beta() const { return k_.beta; }

    // E[eta(1)^{1/beta}] fixed by N(sigma > s) = s^{-1/beta} / Gamma(1 - 1/beta).
    double target_moment() const {
        return 1.0 / (k_.kappa * (k_.beta - 1.0) * std::tgamma(1.0 - 1.0 / k_.beta));
    }

    // E[eta^p] = p / Gamma(1-p) int_0^inf (1 - Phi(l)) l^{-p-1} dl.
    double moment(const std::vector<double>& logv, double p) const {
        const LogPhi lp{&knots_, &logv};
        const double l1 = knots_[1];
        double acc = -std::expm1(logv[1]) / l1 * std::pow(l1, 1.0 - p) / (1.0 - p);
        for (std::size_t j = 2; j < knots_.size(); ++j) {
            const double a = std::log(knots_[j - 1]), b = std::log(knots_[j]);
            acc += gl(a, b, [&](double u) {
                const double l = std::exp(u);
                return -std::expm1(lp(l)) * std::pow(l, -p);
            });
        }
        const double top = knots_.back();
        const double slope = (logv[logv.size() - 1] - logv[logv.size() - 2]) / (top - knots_[knots_.size() - 2]);
        // Past the last knot Phi decays like exp(slope (l - top)).
        acc += std::pow(top, -p) / p;
        const double phi_top = std::exp(logv.back());
        if (slope < 0.0) {
            const double span = 40.0 / -slope;
            acc -= gl(top, top + span, [&](double l) { return phi_top * std::exp(slope * (l - top)) * std::pow(l, -p - 1.0); });
        }
        return p / std::tgamma(1.0 - p) * acc;
    }

    // log Phi(c lambda) on the knots.
    std::vector<double> rescale(const std::vector<double>& logv, double c) const {
        const LogPhi lp{&knots_, &logv};
        std::vector<double> out(logv.size());
        for (std::size_t j = 0; j < knots_.size(); ++j) out[j] = lp(c * knots_[j]);
        return out;
    }

    // Cumulative integrals on the knot intervals: G(s_j) and F(s_j).
    struct Sweep {
        std::vector<double> big_g, big_f;
    };

    Sweep sweep(const std::vector<double>& logv) const {
        const auto g = g_fn(logv);
        Sweep w{std::vector<double>(knots_.size(), 0.0), std::vector<double>(knots_.size(), 0.0)};
        for (std::size_t j = 1; j < knots_.size(); ++j) {
            w.big_f[j] = w.big_f[j - 1] + partial_f(g, s_[j - 1], s_[j], w.big_g[j - 1]);
            w.big_g[j] = w.big_g[j - 1] + k_.kappa * gl(s_[j - 1], s_[j], g);
        }
        return w;
    }

    // New log Phi on the knots.
    std::vector<double> apply(const std::vector<double>& logv) const {
        const auto w = sweep(logv);
        std::vector<double> out(knots_.size());
        for (std::size_t j = 0; j < knots_.size(); ++j) out[j] = -k_.beta * w.big_f[j];
        return out;
    }

    // RHS(Phi)(lambda) at an arbitrary lambda inside the knot range.
    double rhs_at(const std::vector<double>& logv, const Sweep& w, double lambda) const {
        if (lambda <= 0.0) return 1.0;
        const double s = std::pow(lambda, -k_.alpha);
        auto it = std::upper_bound(s_.begin(), s_.end(), s);
        std::size_t j = std::size_t(it - s_.begin());
        if (j >= s_.size()) j = s_.size() - 1;
        const auto g = g_fn(logv);
        const double f = w.big_f[j - 1] + partial_f(g, s_[j - 1], s, w.big_g[j - 1]);
        return std::exp(-k_.beta * f);
    }

private:
    template <class Fn>
    double gl(double lo, double hi, Fn&& fn) const {
        const double m = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        double acc = 0.0;
        for (std::size_t i = 0; i < gl_.x.size(); ++i) acc += gl_.w[i] * fn(m + h * gl_.x[i]);
        return acc * h;
    }

    // From 0 the F integrand is s^{1/(beta-1)} times a series in
    // s^{beta/(beta-1)}; s = hi y^{-3 alpha} turns it into a polynomial in y.
    template <class Fn>
    double integrate(double lo, double hi, Fn&& fn) const {
        if (lo > 0.0) return gl(lo, hi, fn);
        const double k = -3.0 * k_.alpha;
        return gl(0.0, 1.0, [&](double y) {
            const double yk1 = std::pow(y, k - 1.0);
            return fn(hi * yk1 * y) * k * hi * yk1;
        });
    }

    template <class G>
    double partial_f(const G& g, double lo, double hi, double g0) const {
        const double b = k_.beta;
        return integrate(lo, hi, [&](double s) {
            const double big_g = g0 + k_.kappa * gl(lo, s, g);
            const double a_pow = std::pow(k_.c_beta, b - 1.0) / s;  // A(s)^{beta-1}
            const double ratio = big_g / (k_.c_beta * std::pow(s, 1.0 / (1.0 - b)));
            return a_pow * std::expm1((b - 1.0) * std::log1p(ratio));
        });
    }

    StableConstants k_;
    std::vector<double> knots_;
    std::vector<double> s_;
    GaussLegendre gl_;
};

void check_grid(double alpha, const std::vector<double>& grid) {
    if (!(alpha > -0.5 && alpha < 0.0)) throw std::invalid_argument("solve_phi_fixed_point: alpha outside (-1/2,0)");
    if (grid.size() < 2 || grid.front() != 0.0)
        throw std::invalid_argument("solve_phi_fixed_point: grid must start at 0 and have >= 2 points");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("solve_phi_fixed_point: grid not ascending");
}

}  // namespace

double PhiTable::operator()(double lambda) const {
    return std::exp(log_value(lambda));
}

double PhiTable::log_value(double lambda) const {
    if (knots.size() < 5) throw std::logic_error("PhiTable: no solver knots");
    return LogPhi{&knots, &log_knots}(lambda);
}

PhiTable solve_phi_fixed_point(double alpha, const std::vector<double>& lambda_grid, double tol, int max_iter,
                               const PhiSolverOptions& opts) {
    check_grid(alpha, lambda_grid);
    if (!(tol > 0.0)) throw std::invalid_argument("solve_phi_fixed_point: tol <= 0");
    const PhiOperator op(alpha, geometric_knots(lambda_grid.back(), opts.knots_per_decade), opts.gl_points);
    const auto& knots = op.knots();
    const double p = 1.0 / op.beta();
    const double target = op.target_moment();
    std::vector<double> logv(knots.size());
    for (std::size_t j = 0; j < knots.size(); ++j) logv[j] = -opts.initial_rate * knots[j];

    // The equation is invariant under lambda -> c lambda; each step picks the
    // member of that family with the right E[eta^{1/beta}].
    auto sup_change = [](const std::vector<double>& x, const std::vector<double>& y) {
        double d = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) d = std::max(d, std::fabs(std::exp(x[j]) - std::exp(y[j])));
        return d;
    };
    int it = 0;
    double change = 1.0;
    while (it < max_iter) {
        auto next = op.apply(logv);
        next = op.rescale(next, std::pow(target / op.moment(next, p), 1.0 / p));
        change = sup_change(next, logv);
        logv = std::move(next);
        ++it;
        if (change < 0.01 * tol) break;
    }
    if (!(change < 0.01 * tol))
        throw PhiNonConvergence("solve_phi_fixed_point: no convergence within max_iter", change);

    PhiTable t;
    t.alpha = alpha;
    t.lambdas = lambda_grid;
    t.iterations = it;
    t.knots = knots;
    t.log_knots = logv;
    for (double lam : lambda_grid) t.values.push_back(t(lam));
    t.values.front() = 1.0;
    t.residual = phi_fixed_point_residual(t, opts);
    return t;
}

double phi_fixed_point_residual(const PhiTable& table, const PhiSolverOptions& opts) {
    if (table.knots.size() < 5) throw std::invalid_argument("phi_fixed_point_residual: table has no knots");
    const PhiOperator op(table.alpha, table.knots, opts.gl_points);
    const auto sweep = op.sweep(table.log_knots);
    double r = 0.0;
    for (std::size_t i = 0; i < table.lambdas.size(); ++i) {
        const double lam = table.lambdas[i];
        const double have = i < table.values.size() ? table.values[i] : table(lam);
        r = std::max(r, std::fabs(op.rhs_at(table.log_knots, sweep, lam) - have));
    }
    return r;
}

double phi_eta_moment(const PhiTable& table, double p) {
    const PhiOperator op(table.alpha, table.knots, 8);
    return op.moment(table.log_knots, p);
}

double phi_eta_mean(const PhiTable& table) {
    if (table.knots.size() < 5) throw std::invalid_argument("phi_eta_mean: table has no knots");
    return -table.log_knots[1] / table.knots[1];
}

double stable_inverse_max_mean(double beta) {
    const auto k = stable_constants(beta);
    std::vector<double> grid{0.0, 1.0};
    const auto table = solve_phi_fixed_point(k.alpha, grid, 1e-9, 500);
    return k.kappa * (beta - 1.0) * std::tgamma(1.0 - 1.0 / beta) * phi_eta_mean(table);
}

double phi_rhs_r_quadrature(const PhiTable& table, double lambda) {
    if (!(lambda > 0.0)) return 1.0;
    const auto k = stable_constants(1.0 / (1.0 + table.alpha));
    const double a = k.alpha, b = k.beta;
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    auto g = [&](double v) {
        const double lam = std::pow(v, -1.0 / a);
        return -std::expm1(table.log_value(lam)) / lam;
    };
    // int_0^inf atom_rate r^{-beta} e^{-r A} (1 - e^{-r G}) dr, split at 1/(A+G).
    auto r_integral = [&](double bigA, double G) {
        auto h = [&](double r) { return k.atom_rate * std::pow(r, -b) * std::exp(-r * bigA) * -std::expm1(-r * G); };
        const double rb = 1.0 / (bigA + G);
        // r = rb w^{1/(2-beta)} removes the r^{1-beta} singularity at 0.
        auto head = [&](double w) {
            const double r = rb * std::pow(w, 1.0 / (2.0 - b));
            return h(r) * rb / (2.0 - b) * std::pow(w, (b - 1.0) / (2.0 - b));
        };
        const double part1 = gauss<double, 30>::integrate(head, 0.0, 1.0);
        const double part2 = gauss_kronrod<double, 31>::integrate(
            [&](double y) { return rb * h(rb * (1.0 + y)); }, 0.0, std::numeric_limits<double>::infinity(), 8, 1e-13);
        return part1 + part2;
    };
    // Panels geometric in s below s_max = lambda^{-alpha}; below s_lo the
    // integrand is O(s^{1/(beta-1)}) and G is linear.
    const double s_max = std::pow(lambda, -a);
    const double s_lo = 1e-12 * s_max;
    constexpr int panels_per_decade = 20;
    const int panels = 12 * panels_per_decade;
    const double lam_lo = std::pow(s_lo, -1.0 / a);
    double big_g = k.kappa * s_lo * -std::expm1(table.log_value(lam_lo)) / lam_lo;
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double u0 = std::log(s_lo) + std::log(1e12) * i / panels;
        const double u1 = std::log(s_lo) + std::log(1e12) * (i + 1) / panels;
        auto inner = [&](double lo, double hi) {
            return k.kappa * gauss<double, 20>::integrate([&](double u) { return std::exp(u) * g(std::exp(u)); }, lo, hi);
        };
        total += gauss<double, 20>::integrate(
            [&](double u) {
                const double s = std::exp(u);
                const double G = big_g + inner(u0, u);
                return s * r_integral(k.c_beta * std::pow(s, 1.0 / (1.0 - b)), G);
            },
            u0, u1);
        big_g += inner(u0, u1);
    }
    return std::exp(-total);
}

}  // namespace fragsim
