#pragma once

#include <cstdint>
#include <cmath>

namespace bhchain {

// SplitMix64: tiny, fast, and fully pinned so that seeded runs produce the
// same streams on every platform (std::normal_distribution is
// implementation-defined, which would break golden outputs).
struct SplitMix64 {
    std::uint64_t s = 0;

    explicit SplitMix64(std::uint64_t seed = 0) : s(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal via Box-Muller (uses two uniforms per call; no state
    /// caching so the stream position is easy to reason about).
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        // avoid log(0)
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }
};

/// Derives an independent stream for task `idx` from a master seed. Splittable
/// counter scheme: the master seed and index are hashed together, so the same
/// (seed, idx) pair gives the same stream no matter how work is scheduled.
inline SplitMix64 seed_stream(std::uint64_t master, std::uint64_t idx) {
    SplitMix64 h(master ^ (0x9e3779b97f4a7c15ULL * (idx + 1)));
    std::uint64_t s = h.next();
    s ^= h.next() << 1;
    return SplitMix64(s);
}

}  // namespace bhchain
