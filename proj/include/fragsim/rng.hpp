#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace fragsim {

// Key for a random stream: a user seed, a stream id naming the consumer,
// and a trial index. Distinct keys give statistically independent streams.
struct Seed {
    std::uint64_t value = 0;
    std::uint64_t stream = 0;
    std::uint64_t trial = 0;

    Seed with_stream(std::uint64_t s) const { return {value, s, trial}; }
    Seed with_trial(std::uint64_t t) const { return {value, stream, t}; }
    // Child key for a nested consumer; mixes the tag into the stream id.
    Seed child(std::uint64_t tag) const;
};

std::uint64_t splitmix64(std::uint64_t x);

// Philox4x32-10 in counter mode. Satisfies UniformRandomBitGenerator.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(const Seed& seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    // Uniform on the open interval (0,1), 53-bit resolution.
    double uniform();

private:
    void refill();

    std::array<std::uint32_t, 2> key_{};
    std::uint64_t block_ = 0;
    std::uint64_t trial_ = 0;
    std::array<std::uint64_t, 2> buf_{};
    int pos_ = 2;
};

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

}  // namespace fragsim
