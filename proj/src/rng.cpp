#include "fragsim/rng.hpp"

namespace fragsim {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Seed Seed::child(std::uint64_t tag) const {
    return {value, splitmix64(stream ^ splitmix64(tag + 0x5851f42d4c957f2dULL)), trial};
}

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t(M0) * c[0];
        const std::uint64_t p1 = std::uint64_t(M1) * c[2];
        const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
        const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += W0;
        k[1] += W1;
    }
    return c;
}

Rng::Rng(const Seed& seed) {
    const std::uint64_t k = splitmix64(seed.value ^ splitmix64(seed.stream));
    key_ = {std::uint32_t(k), std::uint32_t(k >> 32)};
    trial_ = seed.trial;
}

void Rng::refill() {
    const auto out = philox4x32({std::uint32_t(block_), std::uint32_t(block_ >> 32), std::uint32_t(trial_),
                                 std::uint32_t(trial_ >> 32)},
                                key_);
    ++block_;
    buf_[0] = (std::uint64_t(out[0]) << 32) | out[1];
    buf_[1] = (std::uint64_t(out[2]) << 32) | out[3];
    pos_ = 0;
}

Rng::result_type Rng::operator()() {
    if (pos_ == 2) refill();
    return buf_[pos_++];
}

double Rng::uniform() {
    return (double((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace fragsim
