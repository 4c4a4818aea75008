#pragma once

#include <cmath>
#include <cstdint>

namespace scalekit {

/// Counter-based deterministic random source: output c of this generator is
/// the c-th value of a SplitMix64 stream offset by the seed. Every draw is
/// a pure function of (seed, counter), so generation order and thread count
/// never change the result.
struct CounterRng {
    std::uint64_t seed = 0;

    static std::uint64_t mix(std::uint64_t z) noexcept {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t bits(std::uint64_t counter) const noexcept {
        return mix(seed + (counter + 1) * 0x9E3779B97F4A7C15ULL);
    }

    /// Uniform draw in (0, 1] (exclusive of zero so log() is always safe).
    double uniform01(std::uint64_t counter) const noexcept {
        return 1.0 - static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller on counters (2c, 2c+1).
    double gaussian(std::uint64_t counter) const noexcept {
        const double u1 = uniform01(2 * counter);
        const double u2 = uniform01(2 * counter + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
};

}  // namespace scalekit
