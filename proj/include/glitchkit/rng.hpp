#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace glitchkit {

/// Deterministic 64-bit random stream. The sequence depends only on the
/// seed, never on the platform or standard library, so corpora built on
/// one machine replay bit-exactly on another. Child streams derived via
/// child() are independent for distinct keys, which keeps per-image
/// corruption reproducible under parallel corpus builds.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // splitmix64 step (Steele et al.); full 64-bit period, fully portable.
    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform real in [lo, hi]. lo == hi returns lo exactly.
    double uniform(double lo, double hi) {
        if (lo > hi) throw std::invalid_argument("Rng::uniform: lo > hi");
        const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    /// Uniform integer in [lo, hi], both ends inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (lo > hi) throw std::invalid_argument("Rng::uniform_int: lo > hi");
        const std::uint64_t range =
            static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
        if (range == 0) return static_cast<std::int64_t>(next_u64());  // full 64-bit span
        // rejection sampling keeps the draw unbiased and platform-independent
        const std::uint64_t bound = range * ((~std::uint64_t{0}) / range);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= bound);
        return lo + static_cast<std::int64_t>(x % range);
    }

    /// Standard normal via Box-Muller on the portable uniform stream.
    double normal() {
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform(0.0, 1.0);
        const double u2 = uniform(0.0, 1.0);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    bool coin_flip() { return (next_u64() & 1ULL) != 0; }

    /// Independent child stream keyed by (this stream's seed, key).
    Rng child(std::uint64_t key) const {
        std::uint64_t z = seed_ ^ (0x9e3779b97f4a7c15ULL * (key + 0x632be59bd9b4e019ULL));
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return Rng(z ^ (z >> 31));
    }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

}  // namespace glitchkit
