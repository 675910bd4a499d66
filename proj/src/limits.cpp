#include "fragsim/limits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "fragsim/analytics.hpp"
#include "fragsim/paths.hpp"

namespace fragsim {

namespace {

// One side of a Bessel path, continued (and spliced) until it stays above
// `level`, if level > 0.
std::vector<double> bessel_side(std::size_t steps, double dt, double level, Rng& rng) {
    auto v = bessel3_values(steps, dt, 0.0, rng);
    if (!(level > 0.0)) return v;
    for (int guard = 0; guard < 10000; ++guard) {
        const double r = v.back();
        if (r > level && rng.uniform() >= level / r) return v;
        // Either still below the level, or it comes back down to it: the
        // part above is cut out and the path restarts from the level.
        const double start = r > level ? level : r;
        auto more = bessel3_values(steps, dt, start, rng);
        v.insert(v.end(), more.begin() + 1, more.end());
    }
    throw std::runtime_error("sample_h_infinity_brownian: completion did not terminate");
}

// Exact inf{x > 0 : f(x) > m} along values sampled at spacing dt from 0,
// or a negative value if f never exceeds m. A side that ends exactly at m
// (a capped sample) passes there.
double first_passage(const std::vector<double>& v, double dt, double m) {
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        if (v[k + 1] > m) {
            if (v[k] > m) return double(k) * dt;
            return (double(k) + (m - v[k]) / (v[k + 1] - v[k])) * dt;
        }
    }
    if (v.back() == m) return double(v.size() - 1) * dt;
    return -1.0;
}

std::vector<EtaPoint> eta_curve(const std::vector<double>& side, double dt, std::size_t levels) {
    std::vector<EtaPoint> out;
    const double top = *std::max_element(side.begin(), side.end());
    for (std::size_t i = 1; i <= levels; ++i) {
        const double m = top * double(i) / double(levels + 1);
        out.push_back({m, first_passage(side, dt, m)});
    }
    return out;
}

// Values on one side of 0, as seen going outwards.
std::vector<double> side_values(const SampledPath& p, bool right) {
    const auto& v = p.values();
    const double u = -p.t0() / p.dt();
    const std::size_t zero = std::size_t(std::llround(u));
    if (right) return {v.begin() + std::ptrdiff_t(zero), v.end()};
    std::vector<double> out(v.begin(), v.begin() + std::ptrdiff_t(zero) + 1);
    std::reverse(out.begin(), out.end());
    return out;
}

}  // namespace

HInfinitySample sample_h_infinity_brownian(double L, std::size_t grid_n, const Seed& seed,
                                           const BrownianHInfinityOptions& opts) {
    if (!(L > 0.0)) throw std::invalid_argument("sample_h_infinity_brownian: L <= 0");
    if (grid_n < 1) throw std::invalid_argument("sample_h_infinity_brownian: grid_n < 1");
    const double dt = L / double(grid_n);
    Rng right_rng(seed.child(1)), left_rng(seed.child(2));
    auto right = bessel_side(grid_n, dt, opts.complete_level, right_rng);
    auto left = bessel_side(grid_n, dt, opts.complete_level, left_rng);

    HInfinitySample s;
    s.eta_plus = eta_curve(right, dt, opts.eta_levels);
    s.eta_minus = eta_curve(left, dt, opts.eta_levels);
    std::vector<double> v(left.rbegin(), left.rend());
    v.insert(v.end(), right.begin() + 1, right.end());
    const double t0 = -double(left.size() - 1) * dt;
    s.path = SampledPath(t0, dt, std::move(v), {2.0, PathKind::h_infinity, seed.value});
    return s;
}

StableExcursionBank::StableExcursionBank(double beta, std::size_t size, std::size_t grid_n, const Seed& seed)
    : beta_(beta) {
    if (!(beta > 1.0 && beta < 2.0)) throw std::invalid_argument("StableExcursionBank: beta outside (1,2)");
    if (size < 1) throw std::invalid_argument("StableExcursionBank: empty bank");
    double inv = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        paths_.push_back(sample_stable_excursion({beta, grid_n, seed.with_trial(i)}));
        zeta_.push_back(extinction(paths_.back()).zeta);
        inv += 1.0 / zeta_.back();
    }
    mean_inv_zeta_ = inv / double(size);
}

namespace {

constexpr std::size_t dust_cells = 256;

double table_lookup(const std::vector<double>& table, double hi, double m) {
    if (table.empty() || !(m > 0.0)) return 0.0;
    const double u = std::min(m / hi, 1.0) * double(table.size() - 1);
    const std::size_t k = std::min(std::size_t(u), table.size() - 2);
    const double f = u - double(k);
    return table[k] + f * (table[k + 1] - table[k]);
}

}  // namespace

double StableEta::dust(double m) const { return table_lookup(dust_table, truncation.m_cap, m); }

double StableEta::eta_minus(double m) const {
    double s = 0.5 * dust(m);
    for (std::size_t i = 0; i < atoms.size() && atoms[i].t <= m; ++i) s += left[i];
    return s;
}

double StableEta::eta_plus(double m) const {
    double s = 0.5 * dust(m);
    for (std::size_t i = 0; i < atoms.size() && atoms[i].t <= m; ++i) s += right[i];
    return s;
}

StableEta sample_stable_eta(double beta, double m_cap, double r_min, const StableExcursionBank& bank,
                            const Seed& seed, const StableHInfinityOptions& opts) {
    if (!(beta > 1.0 && beta < 2.0)) throw std::invalid_argument("sample_h_infinity_stable: beta outside (1,2)");
    if (!(m_cap > 0.0)) throw std::invalid_argument("sample_h_infinity_stable: m_cap <= 0");
    if (!(r_min > 0.0)) throw std::invalid_argument("sample_h_infinity_stable: r_min <= 0");
    if (bank.beta() != beta) throw std::invalid_argument("sample_h_infinity_stable: bank built for another beta");
    const auto k = stable_constants(beta);
    const double alpha = k.alpha;
    const double g = std::tgamma(1.0 - 1.0 / beta);
    auto a_of = [&](double t) { return k.c_beta * std::pow(t, 1.0 / (1.0 - beta)); };
    // Mean lifetime per unit local time of the sub-excursions at level t.
    const double sigma_per_local_time = bank.mean_inverse_zeta() / ((beta - 1.0) * g);

    StableEta out;
    out.beta = beta;
    out.truncation = {m_cap, r_min};
    Rng rng(seed);

    // Atoms with r >= r_min by thinning the intensity atom_rate r^{-beta} dr dt.
    const double proposal_mass = m_cap * k.atom_rate * std::pow(r_min, 1.0 - beta) / (beta - 1.0);
    boost::random::poisson_distribution<long, double> n_prop(proposal_mass);
    const long n = n_prop(rng);
    for (long i = 0; i < n; ++i) {
        const double t = m_cap * rng.uniform();
        const double r = r_min * std::pow(rng.uniform(), -1.0 / (beta - 1.0));
        const double v = rng.uniform();
        if (rng.uniform() < std::exp(-r * a_of(t))) out.atoms.push_back({v, r, t});
    }
    std::sort(out.atoms.begin(), out.atoms.end(), [](const PoissonAtom& x, const PoissonAtom& y) { return x.t < y.t; });
    out.degenerate = out.atoms.empty();

    // Sub-excursions du N(., H_max <= t): lifetimes from the tail
    // N(sigma > s) = s^{-1/beta} / Gamma(1 - 1/beta), shapes from the bank.
    boost::random::uniform_int_distribution<std::size_t> pick(0, bank.size() - 1);
    out.left.assign(out.atoms.size(), 0.0);
    out.right.assign(out.atoms.size(), 0.0);
    out.atom_dust_left.assign(out.atoms.size(), 0.0);
    out.atom_dust_right.assign(out.atoms.size(), 0.0);
    for (std::size_t i = 0; i < out.atoms.size(); ++i) {
        const auto& at = out.atoms[i];
        const double s_min = opts.sigma_frac * std::pow(at.t, beta / (beta - 1.0));
        const double small = at.r * std::pow(s_min, 1.0 - 1.0 / beta) / ((beta - 1.0) * g);
        out.atom_dust_left[i] = at.v * small;
        out.atom_dust_right[i] = (1.0 - at.v) * small;
        out.left[i] += out.atom_dust_left[i];
        out.right[i] += out.atom_dust_right[i];
        boost::random::poisson_distribution<long, double> n_sub(at.r * std::pow(s_min, -1.0 / beta) / g);
        const long ns = n_sub(rng);
        for (long j = 0; j < ns; ++j) {
            const double sigma = s_min * std::pow(rng.uniform(), -beta);
            const double u = at.r * rng.uniform();
            const std::size_t b = pick(rng);
            if (std::pow(sigma, -alpha) * bank.zeta(b) > at.t) continue;
            const bool is_left = u < at.v * at.r;
            const double pos = is_left ? u : u - at.v * at.r;
            out.explicit_subs.push_back({i, is_left, pos, sigma, b});
            (is_left ? out.left[i] : out.right[i]) += sigma;
        }
    }

    // Atoms below r_min: local time density atom_rate a^{beta-2} gamma(2-beta, a r_min)
    // at level t, each unit carrying sigma_per_local_time * t of lifetime.
    auto density = [&](double t) {
        if (!(t > 0.0)) return 0.0;
        const double a = a_of(t);
        const double lower = boost::math::tgamma_lower(2.0 - beta, a * r_min);
        return k.atom_rate * std::pow(a, beta - 2.0) * lower * sigma_per_local_time * t;
    };
    out.dust_table.assign(dust_cells + 1, 0.0);
    for (std::size_t c = 0; c < dust_cells; ++c) {
        const double lo = m_cap * double(c) / dust_cells, hi = m_cap * double(c + 1) / dust_cells;
        out.dust_table[c + 1] = out.dust_table[c] + boost::math::quadrature::gauss<double, 20>::integrate(density, lo, hi);
    }
    return out;
}

namespace {

// Renders one side of the stable construction at spacing dt, outwards from 0.
std::vector<double> render_side(const StableEta& s, const StableExcursionBank& bank, bool left, double dt) {
    const double alpha = 1.0 / s.beta - 1.0;
    const double total = left ? s.eta_minus(s.truncation.m_cap) : s.eta_plus(s.truncation.m_cap);
    const std::size_t cells = std::max<std::size_t>(1, std::size_t(std::ceil(total / dt - 1e-9)));
    std::vector<double> v(cells + 1, 0.0);

    struct Piece {
        double x0, len;
        double level0, level1;  // ramp, or the gluing level for a sub-excursion
        long sub;               // index into explicit_subs, -1 for a ramp
    };
    std::vector<Piece> pieces;
    double x = 0.0, level = 0.0, dust_prev = 0.0;
    std::vector<std::vector<std::size_t>> subs_of(s.atoms.size());
    for (std::size_t j = 0; j < s.explicit_subs.size(); ++j)
        if (s.explicit_subs[j].left == left) subs_of[s.explicit_subs[j].atom].push_back(j);
    for (std::size_t i = 0; i <= s.atoms.size(); ++i) {
        const double t = i < s.atoms.size() ? s.atoms[i].t : s.truncation.m_cap;
        const double d = 0.5 * s.dust(t);
        pieces.push_back({x, d - dust_prev, level, t, -1});
        x += d - dust_prev;
        dust_prev = d;
        level = t;
        if (i == s.atoms.size()) break;
        auto& idx = subs_of[i];
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return s.explicit_subs[a].position < s.explicit_subs[b].position; });
        const auto& at = s.atoms[i];
        const double side_r = left ? at.v * at.r : (1.0 - at.v) * at.r;
        const double side_dust = left ? s.atom_dust_left[i] : s.atom_dust_right[i];
        const double per_local_time = side_r > 0.0 ? side_dust / side_r : 0.0;
        double consumed = 0.0;  // local time already laid out
        for (std::size_t j : idx) {
            const auto& e = s.explicit_subs[j];
            const double flat = (e.position - consumed) * per_local_time;
            pieces.push_back({x, flat, t, t, -1});
            x += flat;
            consumed = e.position;
            pieces.push_back({x, e.sigma, t, t, long(j)});
            x += e.sigma;
        }
        const double flat = (side_r - consumed) * per_local_time;
        pieces.push_back({x, flat, t, t, -1});
        x += flat;
    }

    std::size_t p = 0;
    for (std::size_t c = 0; c <= cells; ++c) {
        const double xc = std::min(double(c) * dt, x);
        while (p + 1 < pieces.size() && pieces[p].x0 + pieces[p].len < xc) ++p;
        const auto& pc = pieces[p];
        const double f = pc.len > 0.0 ? std::clamp((xc - pc.x0) / pc.len, 0.0, 1.0) : 1.0;
        if (pc.sub < 0) {
            v[c] = pc.level0 + f * (pc.level1 - pc.level0);
        } else {
            const auto& e = s.explicit_subs[std::size_t(pc.sub)];
            v[c] = pc.level0 - std::pow(e.sigma, -alpha) * bank.path(e.bank_index).eval(f);
        }
    }
    // The capped path ends at the cap.
    v.back() = s.truncation.m_cap;
    return v;
}

}  // namespace

HInfinitySample sample_h_infinity_stable(double beta, double m_cap, double r_min, std::size_t grid_n,
                                         const Seed& seed, const StableExcursionBank& bank,
                                         const StableHInfinityOptions& opts) {
    if (grid_n < 2) throw std::invalid_argument("sample_h_infinity_stable: grid_n < 2");
    const auto s = sample_stable_eta(beta, m_cap, r_min, bank, seed, opts);
    HInfinitySample out;
    out.truncation = s.truncation;
    out.atoms = s.atoms;
    out.degenerate = s.degenerate;
    const double em = s.eta_minus(m_cap), ep = s.eta_plus(m_cap);
    const double span = em + ep;
    const double dt = span > 0.0 ? span / double(grid_n) : 1.0;
    auto right = render_side(s, bank, false, dt);
    auto left = render_side(s, bank, true, dt);
    std::vector<double> v(left.rbegin(), left.rend());
    v.insert(v.end(), right.begin() + 1, right.end());
    out.path = SampledPath(-double(left.size() - 1) * dt, dt, std::move(v), {beta, PathKind::h_infinity, seed.value});
    out.eta_minus.push_back({0.0, 0.0});
    out.eta_plus.push_back({0.0, 0.0});
    for (const auto& at : s.atoms) {
        out.eta_minus.push_back({at.t, s.eta_minus(at.t)});
        out.eta_plus.push_back({at.t, s.eta_plus(at.t)});
    }
    out.eta_minus.push_back({m_cap, em});
    out.eta_plus.push_back({m_cap, ep});
    return out;
}

HInfinitySample sample_h_infinity_stable(double beta, double m_cap, double r_min, std::size_t grid_n,
                                         const Seed& seed) {
    const StableExcursionBank bank(beta, 512, 4096, seed.child(0x62616e6b));
    return sample_h_infinity_stable(beta, m_cap, r_min, grid_n, seed, bank);
}

EtaPair eta_at(const HInfinitySample& sample, double m) {
    if (!(m > 0.0)) throw std::invalid_argument("eta_at: m <= 0");
    if (sample.truncation.m_cap > 0.0 && m > sample.truncation.m_cap)
        throw DomainExceeded("eta_at: level above the truncation cap");
    const double dt = sample.path.dt();
    const double r = first_passage(side_values(sample.path, true), dt, m);
    const double l = first_passage(side_values(sample.path, false), dt, m);
    if (r < 0.0 || l < 0.0) throw DomainExceeded("eta_at: passage not reached inside the domain");
    return {l, r};
}

LimitFragmentation limit_fragmentation(const HInfinitySample& sample) {
    const auto& v = sample.path.values();
    if (sample.truncation.m_cap > 0.0 && sample.truncation.m_cap < 1.0)
        throw DomainExceeded("limit_fragmentation: sample capped below level 1");
    if (v.front() < 1.0 || v.back() < 1.0) throw DomainExceeded("limit_fragmentation: set reaches the domain edge");
    LimitFragmentation out;
    out.set = sublevel_set(sample.path, 1.0);
    out.masses = ranked_lengths(out.set);
    return out;
}

}  // namespace fragsim
