#pragma once

#include <cstdint>

namespace fastescape {

/**
 * splitmix64: tiny, fast, and fully deterministic across platforms.  Every
 * sampling site in the library derives its stream from (seed, lattice
 * coordinates) via mix64, so results never depend on thread scheduling.
 */
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

/// Stateless mixing of a seed with up to two coordinates, for per-cell
/// independent streams.
inline uint64_t mix64(uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    SplitMix64 g(a ^ (b * 0x9e3779b97f4a7c15ull) ^ (c * 0xc2b2ae3d27d4eb4full));
    g.next();
    return g.next();
}

} // namespace fastescape
