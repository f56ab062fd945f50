#pragma once

#include <cmath>
#include <cstdint>

#include "isnet/error.hpp"

namespace isnet {

namespace detail {

// SplitMix64 step (Vigna, 2015). Used only to key the main generator.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace detail

/// Deterministic pseudo-random stream keyed by (seed, stream_id).
///
/// Generator: xoshiro256++ 1.0, state derived from the key with a
/// SplitMix64 chain (seed is absorbed first, then the stream id, so the
/// key roles are not interchangeable). Identical keys produce identical
/// sequences on every platform; distinct stream ids give statistically
/// independent streams. Floating-point conversion is done from raw bits
/// here rather than with std distributions, which are not portable.
///
/// A stream has a single owner. Concurrent use requires distinct
/// stream ids.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : seed_(seed), stream_id_(stream_id) {
        std::uint64_t sm = seed;
        (void)detail::splitmix64_next(sm);
        std::uint64_t key = detail::splitmix64_next(sm);
        std::uint64_t sm2 = key ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1));
        for (auto& w : state_) w = detail::splitmix64_next(sm2);
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0)
            state_[0] = 0x9e3779b97f4a7c15ULL;
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Raw 64-bit draw (xoshiro256++).
    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl64(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl64(state_[3], 45);
        return result;
    }

    /// Uniform draw in [lo, hi). Uses the top 53 bits, one u64 per call.
    double uniform(double lo, double hi) {
        if (!(lo < hi))
            throw ConfigError("uniform: requires lo < hi");
        double u = unit();
        double v = lo + (hi - lo) * u;
        if (v >= hi) v = std::nextafter(hi, lo);
        return v;
    }

    /// Gaussian draw via Box-Muller; consumes exactly two u64 per call.
    /// sd == 0 returns mean exactly and consumes nothing.
    double normal(double mean, double sd) {
        if (sd < 0.0)
            throw ConfigError("normal: sd must be >= 0");
        if (sd == 0.0) return mean;
        double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; // (0,1]
        double u2 = unit();                                                    // [0,1)
        constexpr double two_pi = 6.283185307179586476925286766559;
        return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    /// Child stream keyed by two draws from this one. Children are
    /// deterministic functions of the parent state.
    RngStream split() {
        std::uint64_t s = next_u64();
        std::uint64_t id = next_u64();
        return RngStream(s, id);
    }

    /// Uniform draw in [0, 1).
    double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n), unbiased (rejection sampling).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0)
            throw ConfigError("below: n must be positive");
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t state_[4];
};

} // namespace isnet
