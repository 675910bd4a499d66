#include "fragsim/paths.hpp"

#include "fragsim/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include <boost/random/binomial_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace fragsim {

namespace {

std::vector<double> gaussian_walk(std::size_t steps, double sd, Rng& rng) {
    boost::random::normal_distribution<double> normal(0.0, sd);
    std::vector<double> w(steps + 1, 0.0);
    for (std::size_t k = 1; k <= steps; ++k) w[k] = w[k - 1] + normal(rng);
    return w;
}

}  // namespace

SampledPath sample_brownian_bridge(std::size_t grid_n, const Seed& seed) {
    if (grid_n < 2) throw std::invalid_argument("sample_brownian_bridge: grid_n < 2");
    Rng rng(seed);
    const double dt = 1.0 / double(grid_n);
    auto w = gaussian_walk(grid_n, std::sqrt(dt), rng);
    const double end = w[grid_n];
    for (std::size_t k = 0; k <= grid_n; ++k) w[k] -= end * double(k) * dt;
    w[grid_n] = 0.0;
    return SampledPath(0.0, dt, std::move(w), {2.0, PathKind::generic, seed.value});
}

SampledPath sample_brownian_excursion(std::size_t grid_n, const Seed& seed) {
    if (grid_n < 2) throw std::invalid_argument("sample_brownian_excursion: grid_n < 2");
    const auto bridge = sample_brownian_bridge(grid_n, seed);
    const auto& b = bridge.values();
    std::size_t m = 0;
    for (std::size_t k = 1; k < grid_n; ++k)
        if (b[k] < b[m]) m = k;
    std::vector<double> e(grid_n + 1);
    for (std::size_t k = 0; k < grid_n; ++k) e[k] = b[(m + k) % grid_n] - b[m];
    e[0] = 0.0;
    e[grid_n] = 0.0;
    return SampledPath(0.0, bridge.dt(), std::move(e), {2.0, PathKind::excursion, seed.value});
}

std::vector<double> bessel3_values(std::size_t steps, double dt, double r0, Rng& rng) {
    boost::random::normal_distribution<double> normal(0.0, std::sqrt(dt));
    std::vector<double> r(steps + 1);
    double x = r0, y = 0.0, z = 0.0;
    r[0] = r0;
    for (std::size_t k = 1; k <= steps; ++k) {
        x += normal(rng);
        y += normal(rng);
        z += normal(rng);
        r[k] = std::sqrt(x * x + y * y + z * z);
    }
    return r;
}

SampledPath sample_bessel3(std::size_t grid_n, double horizon_T, const Seed& seed) {
    if (!(horizon_T > 0.0)) throw std::invalid_argument("sample_bessel3: horizon_T <= 0");
    if (grid_n < 1) throw std::invalid_argument("sample_bessel3: grid_n < 1");
    Rng rng(seed);
    const double dt = horizon_T / double(grid_n);
    return SampledPath(0.0, dt, bessel3_values(grid_n, dt, 0.0, rng), {2.0, PathKind::bessel3, seed.value});
}

OffspringLaw::OffspringLaw(double b) : beta(b) {
    if (!(b > 1.0 && b <= 2.0)) throw std::invalid_argument("OffspringLaw: beta outside (1,2]");
}

double OffspringLaw::pmf(std::uint64_t k) const {
    if (k == 0) return 1.0 / beta;
    if (k == 1) return 0.0;
    if (beta == 2.0) return k == 2 ? 0.5 : 0.0;
    const double kk = double(k);
    return (beta - 1.0) * std::exp(std::lgamma(kk - beta) - std::lgamma(2.0 - beta) - std::lgamma(kk + 1.0));
}

double OffspringLaw::tail(std::uint64_t k) const {
    if (k == 0) return 1.0;
    if (k <= 2) return 1.0 - 1.0 / beta;
    if (beta == 2.0) return 0.0;
    const double kk = double(k);
    return (beta - 1.0) / beta * std::exp(std::lgamma(kk - beta) - std::lgamma(2.0 - beta) - std::lgamma(kk));
}

std::size_t feasible_tree_size(double beta, std::size_t n) {
    n = std::max<std::size_t>(n, 3);
    if (beta == 2.0 && n % 2 == 0) ++n;
    return n;
}

namespace {

double log_binomial_pmf(double n, double k, double logq, double log1mq) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * logq + (n - k) * log1mq;
}

// Value of xi given xi >= k0 (k0 >= 3), by inverting P(xi >= k | xi >= k0) = b_k / b_k0
// with b_k = Gamma(k - beta) / Gamma(k). Returns cap when the value would reach it.
std::uint64_t sample_offspring_tail(double beta, std::uint64_t k0, std::uint64_t cap, Rng& rng) {
    auto logb = [beta](double k) { return std::lgamma(k - beta) - std::lgamma(k); };
    const double target = logb(double(k0)) + std::log(rng.uniform());
    // Largest k with logb(k) >= target; logb is decreasing.
    const double shift = 0.5 * (1.0 + beta);
    double guess = std::exp(-target / beta) + shift;
    if (!(guess < double(cap))) guess = double(cap);
    std::uint64_t lo = std::max<std::uint64_t>(k0, std::uint64_t(std::max(guess, 1.0)));
    if (lo >= cap) {
        if (logb(double(cap)) >= target) return cap;
        lo = cap - 1;
    }
    std::uint64_t hi;
    if (logb(double(lo)) >= target) {
        hi = lo + 1;
        std::uint64_t step = 1;
        while (hi < cap && logb(double(hi)) >= target) {
            lo = hi;
            step *= 2;
            hi = std::min(cap, hi + step);
        }
        if (hi >= cap && logb(double(cap)) >= target) return cap;
    } else {
        hi = lo;
        std::uint64_t step = 1;
        lo = hi > k0 + step ? hi - step : k0;
        while (lo > k0 && logb(double(lo)) < target) {
            hi = lo;
            step *= 2;
            lo = lo > k0 + step ? lo - step : k0;
        }
    }
    // Invariant: logb(lo) >= target > logb(hi).
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (logb(double(mid)) >= target)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

}  // namespace

std::vector<std::uint32_t> sample_conditioned_offspring(double beta, std::size_t n, Rng& rng) {
    const OffspringLaw law(beta);
    if (n != feasible_tree_size(beta, n)) throw std::invalid_argument("sample_conditioned_offspring: infeasible size");
    const std::uint64_t N = n;
    const std::uint64_t target = N - 1;
    const double t3 = law.tail(3);
    // Given the vertices with at least 3 children, the rest are leaves or binary,
    // and the number of binary ones is Binomial(rest, q2). That factor is handled
    // by an exact acceptance step, the rest by plain rejection on the total.
    const double q2 = law.pmf(2) / (law.pmf(0) + law.pmf(2));
    const double logq = std::log(q2), log1mq = std::log1p(-q2);
    const double m_mean = double(N) * t3;
    const double m_hi = m_mean + 12.0 * std::sqrt(m_mean + 1.0) + 1.0;
    const double r_lo = std::max(1.0, double(N) - m_hi);
    const double log_mode_bound = log_binomial_pmf(r_lo, std::floor((r_lo + 1.0) * q2), logq, log1mq);

    std::vector<std::pair<std::uint64_t, std::uint64_t>> big;  // (value, count)
    for (;;) {
        big.clear();
        std::uint64_t m = 0;
        if (t3 > 0.0) {
            boost::random::binomial_distribution<std::int64_t, double> bin(std::int64_t(N), t3);
            m = std::uint64_t(bin(rng));
        }
        std::uint64_t rem = m, sum = 0;
        bool ok = true;
        std::uint64_t k = 3;
        while (rem > 32 && ok) {
            boost::random::binomial_distribution<std::int64_t, double> bin(std::int64_t(rem), beta / double(k));
            const std::uint64_t c = std::uint64_t(bin(rng));
            if (c) {
                big.emplace_back(k, c);
                sum += k * c;
                rem -= c;
            }
            ++k;
            if (sum + k * rem > target) ok = false;
        }
        while (rem > 0 && ok) {
            const std::uint64_t v = sample_offspring_tail(beta, k, target + 1, rng);
            sum += v;
            --rem;
            big.emplace_back(v, 1);
            if (sum > target) ok = false;
        }
        if (!ok || sum > target) continue;
        const std::uint64_t delta = target - sum;
        if (delta % 2) continue;
        const std::uint64_t n2 = delta / 2, rest = N - m;
        if (n2 > rest) continue;
        const double logp = log_binomial_pmf(double(rest), double(n2), logq, log1mq) - log_mode_bound;
        if (logp < 0.0 && std::log(rng.uniform()) >= logp) continue;

        std::vector<std::uint32_t> seq;
        seq.reserve(N);
        seq.insert(seq.end(), rest - n2, 0u);
        seq.insert(seq.end(), n2, 2u);
        for (const auto& [v, c] : big) seq.insert(seq.end(), c, std::uint32_t(v));
        for (std::size_t i = seq.size() - 1; i > 0; --i) {
            boost::random::uniform_int_distribution<std::size_t> pick(0, i);
            std::swap(seq[i], seq[pick(rng)]);
        }
        // Cycle lemma: start right after the first minimum of the walk.
        std::int64_t w = 0, wmin = 0;
        std::size_t start = 0;
        for (std::size_t i = 0; i < N; ++i) {
            if (w < wmin) {
                wmin = w;
                start = i;
            }
            w += std::int64_t(seq[i]) - 1;
        }
        std::rotate(seq.begin(), seq.begin() + std::ptrdiff_t(start), seq.end());
        return seq;
    }
}

std::vector<std::uint32_t> height_process(const std::vector<std::uint32_t>& offspring) {
    std::vector<std::uint32_t> h(offspring.size(), 0);
    // Stack of ancestors that still have children to be visited.
    std::vector<std::uint32_t> pending;
    for (std::size_t k = 0; k < offspring.size(); ++k) {
        if (k > 0) {
            while (!pending.empty() && pending.back() == 0) pending.pop_back();
            if (pending.empty()) throw std::invalid_argument("height_process: not a tree");
            --pending.back();
            h[k] = std::uint32_t(pending.size());
        }
        if (offspring[k] > 0) pending.push_back(offspring[k]);
    }
    return h;
}

namespace {

// 1 / E[1/zeta] of the limit, cached per beta.
double harmonic_max(double beta) {
    static std::mutex mu;
    static std::map<double, double> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(beta);
    if (it == cache.end()) it = cache.emplace(beta, 1.0 / stable_inverse_max_mean(beta)).first;
    return it->second;
}

}  // namespace

double stable_height_scale(double beta, std::size_t n) {
    const double nn = double(n);
    double s = std::pow(nn / beta, 1.0 / beta) / nn;
    // Finite-size correction: the GW maximum trails the limit by a roughly
    // constant number of generations, fitted once at beta = 2 against
    // E zeta = sqrt(pi/2) and reused for beta < 2.
    constexpr double offset_generations = 7.5;
    double m = 0.0;
    if (beta == 2.0) {
        s /= std::sqrt(2.0);
        m = std::sqrt(std::acos(-1.0) / 2.0);
    } else {
        m = harmonic_max(beta);
    }
    return s * m / std::max(m - offset_generations * s, 0.5 * m);
}

SampledPath sample_stable_excursion(const ExcursionSpec& spec) {
    if (!(spec.beta > 1.0 && spec.beta <= 2.0))
        throw std::invalid_argument("sample_stable_excursion: beta outside (1,2]");
    if (spec.grid_n < 2) throw std::invalid_argument("sample_stable_excursion: grid_n < 2");
    const std::size_t n = feasible_tree_size(spec.beta, spec.grid_n);
    Rng rng(spec.seed);
    const auto offspring = sample_conditioned_offspring(spec.beta, n, rng);
    const auto h = height_process(offspring);
    const double scale = stable_height_scale(spec.beta, n);
    std::vector<double> v(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) v[k] = scale * double(h[k]);
    return SampledPath(0.0, 1.0 / double(n), std::move(v), {spec.beta, PathKind::excursion, spec.seed.value});
}

std::size_t argmax_index(const SampledPath& path) {
    const auto& v = path.values();
    return std::size_t(std::max_element(v.begin(), v.end()) - v.begin());
}

SampledPath flip_at_max(const SampledPath& path) {
    if (path.meta().kind != PathKind::excursion) throw std::invalid_argument("flip_at_max: not an excursion");
    const std::size_t k = argmax_index(path);
    const double top = path[k];
    std::vector<double> o(path.values().size());
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = top - path[i];
    auto meta = path.meta();
    meta.kind = PathKind::generic;
    return SampledPath(path.t0() - path.x(k), path.dt(), std::move(o), meta);
}

}  // namespace fragsim
