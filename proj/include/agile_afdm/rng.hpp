// rng.hpp - counter-based random streams
//
// Every random draw in the library comes from a Stream keyed by
// (seed, stream ids...).  Output i of a stream is mix(key + i * golden), so a
// work item's draws do not depend on which worker runs it or in what order.
// Stream ids used by the harness: {tag, block, channel, particle}.

#pragma once

#include "agile_afdm/types.hpp"

#include <cstdint>
#include <initializer_list>

namespace agile_afdm {

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Well-known stream tags, so unrelated draws never share a key.
enum class StreamTag : std::uint64_t {
    Data = 1,
    Channel = 2,
    Noise = 3,
    SlmMask = 4,
    PtsSample = 5,
    Particle = 6,
    Test = 99,
};

class Stream {
public:
    Stream(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) : key_(mix64(seed)) {
        for (auto id : ids) key_ = mix64(key_ ^ (id + 0x9E3779B97F4A7C15ULL));
    }
    Stream(std::uint64_t seed, StreamTag tag, std::uint64_t a = 0, std::uint64_t b = 0,
           std::uint64_t c = 0)
        : Stream(seed, {static_cast<std::uint64_t>(tag), a, b, c}) {}

    std::uint64_t next_u64() { return mix64(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal (Box-Muller; one draw per call, no cached spare).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    cplx complex_normal(double variance = 1.0) {
        const double s = std::sqrt(variance / 2.0);
        const double re = normal();
        const double im = normal();
        return {s * re, s * im};
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace agile_afdm
