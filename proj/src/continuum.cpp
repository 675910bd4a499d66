#include "fragsim/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "fragsim/analytics.hpp"

namespace fragsim {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

long poisson(double mean, Rng& rng) {
    if (!(mean > 0.0)) return 0;
    boost::random::poisson_distribution<long, double> d(mean);
    return d(rng);
}

// Measure with density 1/max(u, m) on [0, U].
double logflat_mass(double U, double m) {
    if (!(U > 0.0)) return 0.0;
    return U <= m ? U / m : 1.0 + std::log(U / m);
}

double logflat_inverse(double y, double m) { return y <= 1.0 ? y * m : m * std::exp(y - 1.0); }

struct Model {
    double beta, alpha, c, kappa, K, e;
    double rho, sub_frac;
    const std::vector<double>* bank = nullptr;
    double bank_mean = 0.0;
    double gamma_c = 0.0;
    std::vector<double> J;  // cumulative, 64 cells on [0, 1]

    Model(double beta_, double rho_, double sub_frac_, const std::vector<double>* bank_, double bank_mean_)
        : beta(beta_), rho(rho_), sub_frac(sub_frac_), bank(bank_), bank_mean(bank_mean_) {
        const auto k = stable_constants(beta);
        alpha = k.alpha;
        c = k.c_beta;
        kappa = k.kappa;
        K = k.atom_rate;
        e = 1.0 / (1.0 - beta);
        if (!(rho > 0.0) || !(sub_frac > 0.0 && sub_frac < 1.0))
            throw std::invalid_argument("continuum: rho must be positive and sub_frac in (0,1)");
        gamma_c = boost::math::tgamma_lower(2.0 - beta, c * rho);
        const double p = 1.0 / (beta - 1.0);
        auto f = [&](double v) {
            if (v <= 0.0) return 0.0;
            return std::pow(v, p) * boost::math::tgamma_lower(2.0 - beta, c * rho * std::pow(v, -p));
        };
        J.assign(65, 0.0);
        for (int i = 0; i < 64; ++i)
            J[i + 1] = J[i] + boost::math::quadrature::gauss<double, 7>::integrate(f, i / 64.0, (i + 1) / 64.0);
    }

    double tail(double x) const { return c * std::pow(x, e); }
    double inv_tail(double y) const { return std::pow(y / c, 1.0 - beta); }
    double r_min(double s) const { return rho * std::pow(s, 1.0 / (beta - 1.0)); }

    double draw_eta(Rng& rng) const {
        boost::random::uniform_int_distribution<std::size_t> pick(0, bank->size() - 1);
        return (*bank)[pick(rng)];
    }
    double sub_length(double H, Rng& rng) const { return std::pow(H, -1.0 / alpha) * draw_eta(rng); }

    // Mean lifetime carried by atoms below the cutoff at levels in [0, q],
    // cutoff rho max(t, floor)^{1/(beta-1)}.
    double dust_inner(double q, double floor) const {
        if (!(q > 0.0)) return 0.0;
        const double p = beta / (beta - 1.0);
        const double pre = kappa * bank_mean * K * std::pow(c, beta - 2.0);
        if (q <= floor) {
            const double x = q / floor * 64.0;
            const int i = std::min(int(x), 63);
            return pre * std::pow(floor, p) * (J[i] + (x - i) * (J[i + 1] - J[i]));
        }
        return pre * (std::pow(floor, p) * J[64] + gamma_c * (std::pow(q, p) - std::pow(floor, p)) / p);
    }

    // Same on (d_hi, h], cutoff rho max(t - d_hi, floor)^{1/(beta-1)}.
    double dust_outer(double d_hi, double h, double floor) const {
        if (!(h > d_hi)) return 0.0;
        auto f = [&](double t) {
            const double a = c * std::pow(t, e);
            return t * std::pow(a, beta - 2.0) *
                   boost::math::tgamma_lower(2.0 - beta, a * r_min(std::max(t - d_hi, floor)));
        };
        using G = boost::math::quadrature::gauss<double, 20>;
        double s = G::integrate(f, d_hi, std::min(h, d_hi + floor));
        for (double u = floor; d_hi + u < h; u *= 4.0) s += G::integrate(f, d_hi + u, std::min(h, d_hi + 4.0 * u));
        return kappa * bank_mean * K * s;
    }
};

enum class ChildMode { none, immediate, deferred };

struct Node {
    double h = 0.0, d_hi = 0.0, floor = 0.0;
    double total = -1.0;
    std::vector<double> t_atoms, cum_mass;
    struct Child {
        double t, H;
        std::unique_ptr<Node> node;
    };
    std::vector<Child> children;

    double spine(double q, const Model& m) const {
        const auto k = std::upper_bound(t_atoms.begin(), t_atoms.end(), q) - t_atoms.begin();
        return (k > 0 ? cum_mass[k - 1] : 0.0) + m.dust_inner(q, floor);
    }
};

std::vector<double> child_depths(double t, double H, const std::vector<double>& Q) {
    std::vector<double> out;
    for (double q : Q)
        if (q < t && H - (t - q) > 0.0) out.push_back(H - (t - q));
    return out;
}

std::unique_ptr<Node> build(const Model& m, double h, const std::vector<double>& Q, bool need_total, ChildMode mode,
                            double floor, Rng& rng);

void expand(const Model& m, Node& node, const std::vector<double>& Q, Rng& rng) {
    for (auto& ch : node.children) {
        auto q = child_depths(ch.t, ch.H, Q);
        if (!q.empty()) ch.node = build(m, ch.H, q, false, ChildMode::immediate, node.floor, rng);
    }
}

std::unique_ptr<Node> build(const Model& m, double h, const std::vector<double>& Q, bool need_total, ChildMode mode,
                            double floor, Rng& rng) {
    auto node = std::make_unique<Node>();
    node->h = h;
    node->floor = floor;
    const double d_hi = std::min(Q.back(), h);
    const double q_min = Q.front();
    node->d_hi = d_hi;

    // Atoms by thinning K r^{-beta} dr dt above the cutoff.
    const double m1 = logflat_mass(d_hi, floor);
    const double m2 = logflat_mass(h - d_hi, floor);
    const double lam = m.K * std::pow(m.rho, 1.0 - m.beta) / (m.beta - 1.0) * (m1 + m2);
    const long n = poisson(lam, rng);
    struct Atom {
        double t, r;
    };
    std::vector<Atom> atoms;
    atoms.reserve(std::size_t(n));
    for (long i = 0; i < n; ++i) {
        const double y = rng.uniform() * (m1 + m2);
        double t, s;
        if (y < m1) {
            t = logflat_inverse(y, floor);
            s = std::max(t, floor);
        } else {
            const double u = logflat_inverse(y - m1, floor);
            t = d_hi + u;
            s = std::max(u, floor);
        }
        const double r = m.r_min(s) * std::pow(rng.uniform(), -1.0 / (m.beta - 1.0));
        if (rng.uniform() < std::exp(-m.tail(t) * r)) atoms.push_back({t, r});
    }
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.t < b.t; });

    double run = 0.0;
    for (const auto& at : atoms) {
        const bool counted = at.t <= d_hi || need_total;
        const double thr = (mode != ChildMode::none && at.t > q_min) ? floor + std::max(0.0, at.t - d_hi) : inf;
        const double lo = counted ? std::min(m.sub_frac * at.t, thr) : thr;
        if (!(lo < at.t)) continue;
        const double tail_t = m.tail(at.t), tail_lo = m.tail(lo);
        const long k = poisson(at.r * (tail_lo - tail_t), rng);
        double mass = 0.0;
        for (long j = 0; j < k; ++j) {
            const double H = m.inv_tail(tail_t + rng.uniform() * (tail_lo - tail_t));
            if (H >= thr) node->children.push_back({at.t, H, nullptr});
            if (counted) mass += m.sub_length(H, rng);
        }
        if (counted) {
            mass += at.r * m.kappa * m.bank_mean * lo;
            run += mass;
            node->t_atoms.push_back(at.t);
            node->cum_mass.push_back(run);
        }
    }
    if (need_total) node->total = run + m.dust_inner(d_hi, floor) + m.dust_outer(d_hi, h, floor);
    if (mode == ChildMode::immediate) expand(m, *node, Q, rng);
    return node;
}

void query(const Model& m, const Node& node, double q, std::vector<double>& out) {
    if (q >= node.h) {
        if (node.total < 0.0) throw std::logic_error("continuum: whole-excursion query on a partial node");
        out.push_back(node.total);
        return;
    }
    out.push_back(node.spine(q, m));
    for (const auto& ch : node.children)
        if (ch.node && ch.t > q && ch.H > ch.t - q) query(m, *ch.node, ch.H - (ch.t - q), out);
}

RankedMasses ranked(std::vector<double> v, double scale) {
    RankedMasses r;
    for (double x : v)
        if (x > 0.0) r.masses.push_back(x / scale);
    std::sort(r.masses.begin(), r.masses.end(), std::greater<>());
    return r;
}

}  // namespace

double eta_moment_target(double beta) {
    const auto k = stable_constants(beta);
    return 1.0 / (k.kappa * (beta - 1.0) * std::tgamma(1.0 - 1.0 / beta));
}

EtaBank::EtaBank(double beta, const Seed& seed, const EtaBankOptions& opts) : beta_(beta), opts_(opts) {
    if (!(beta > 1.0 && beta < 2.0)) throw std::invalid_argument("EtaBank: beta outside (1,2)");
    if (opts.size < 2 || opts.generations < 1) throw std::invalid_argument("EtaBank: size < 2 or generations < 1");
    if (!(opts.t_floor > 0.0 && opts.t_floor < 1.0)) throw std::invalid_argument("EtaBank: t_floor outside (0,1)");
    const double target = eta_moment_target(beta);
    samples_.assign(opts.size, std::pow(target, beta));
    mean_ = samples_[0];
    std::vector<double> next(opts.size);
    const std::vector<double> unit{1.0};
    for (int g = 0; g < opts.generations; ++g) {
        const Model model(beta, opts.rho, opts.sub_frac, &samples_, mean_);
        const Seed gs = seed.child(std::uint64_t(g) + 1);
        for (std::size_t i = 0; i < opts.size; ++i) {
            Rng rng(gs.with_trial(i));
            next[i] = build(model, 1.0, unit, true, ChildMode::none, opts.t_floor, rng)->total;
        }
        double moment = 0.0;
        for (double x : next) moment += std::pow(x, 1.0 / beta);
        moment /= double(next.size());
        const double scale = std::pow(target / moment, beta);
        double sum = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            samples_[i] = next[i] * scale;
            sum += samples_[i];
        }
        mean_ = sum / double(samples_.size());
    }
    const auto [lo, hi] = std::minmax_element(samples_.begin(), samples_.end());
    min_ = *lo;
    max_ = *hi;
}

double EtaBank::draw(Rng& rng) const {
    boost::random::uniform_int_distribution<std::size_t> pick(0, samples_.size() - 1);
    return samples_[pick(rng)];
}

double EtaBank::laplace(double lambda) const {
    double s = 0.0;
    for (double x : samples_) s += std::exp(-lambda * x);
    return s / double(samples_.size());
}

NearMaxSample sample_stable_near_max(const std::vector<double>& t_list, const EtaBank& bank, const Seed& seed,
                                     const NearMaxOptions& opts) {
    if (t_list.empty()) throw std::invalid_argument("sample_stable_near_max: empty t_list");
    for (double t : t_list)
        if (!(t > 0.0)) throw std::invalid_argument("sample_stable_near_max: t must be positive");
    const double beta = bank.beta();
    const Model m(beta, opts.rho, opts.sub_frac, &bank.samples(), bank.mean());
    const double t_min = *std::min_element(t_list.begin(), t_list.end());
    const double t_max = *std::max_element(t_list.begin(), t_list.end());
    const double floor = opts.resolution * t_min;
    const double d_hi = t_max * std::pow(2.0, -m.alpha);
    // sigma = h^{-1/alpha} eta' in [1, 2) needs h in this range for every eta' in the bank.
    const double h_a = std::pow(1.0 / bank.max(), -m.alpha);
    const double h_b = std::pow(2.0 / bank.min(), -m.alpha);
    const double ta = m.tail(h_a), tb = m.tail(h_b);

    Rng rng(seed);
    NearMaxSample out;
    for (int attempt = 1; attempt <= opts.max_tries; ++attempt) {
        const double h = m.inv_tail(tb + rng.uniform() * (ta - tb));
        auto top = build(m, h, {t_min, d_hi}, true, ChildMode::deferred, floor, rng);
        const double sigma = top->total;
        if (!(sigma >= 1.0 && sigma < 2.0)) continue;
        const double scale = std::pow(sigma, -m.alpha);
        std::vector<double> Q;
        for (double t : t_list) Q.push_back(t * scale);
        std::sort(Q.begin(), Q.end());
        expand(m, *top, Q, rng);
        out.tries = attempt;
        out.sigma = sigma;
        out.zeta = h / scale;
        for (double t : t_list) {
            std::vector<double> blocks;
            query(m, *top, t * scale, blocks);
            out.last_fragment.push_back(blocks.front() / sigma);
            out.fragments.push_back(ranked(std::move(blocks), sigma));
        }
        return out;
    }
    throw std::runtime_error("sample_stable_near_max: lifetime window not hit within max_tries");
}

double sample_stable_excursion_max(const EtaBank& bank, const Seed& seed) {
    return sample_stable_near_max({0.05}, bank, seed).zeta;
}

RankedMasses stable_limit_fragmentation(const EtaBank& bank, const Seed& seed, const StableLimitOptions& opts) {
    if (!(opts.cap > 1.0)) throw std::invalid_argument("stable_limit_fragmentation: cap must exceed 1");
    const Model m(bank.beta(), opts.rho, opts.sub_frac, &bank.samples(), bank.mean());
    Rng rng(seed);
    auto top = build(m, opts.cap, {1.0}, false, ChildMode::immediate, opts.resolution, rng);
    std::vector<double> blocks;
    query(m, *top, 1.0, blocks);
    return ranked(std::move(blocks), 1.0);
}

}  // namespace fragsim
