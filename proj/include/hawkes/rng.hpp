#pragma once

// Counter-keyed pseudo-random substreams. Every stream is a pure function of
// its key, so any (seed, strip, block) cell of the Poisson field can be
// regenerated on demand without touching other streams.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace hawkes {

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Mixes a list of words into one 64-bit key.
inline constexpr std::uint64_t mix_key(std::initializer_list<std::uint64_t> words) {
    std::uint64_t state = 0x243f6a8885a308d3ULL;
    std::uint64_t out = 0;
    for (std::uint64_t w : words) {
        state ^= w;
        out = splitmix64(state);
        state ^= out;
    }
    return out;
}

// xoshiro256++ (Blackman & Vigna), seeded through splitmix64.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit constexpr Xoshiro256(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return double((*this)() >> 11) * 0x1.0p-53; }

    // Exp(rate) by inversion.
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4]{};
};

}  // namespace hawkes
