// Splittable seeding: independent substreams are derived from a 64-bit key
// with the splitmix64 finalizer, so windows, replications and sweep points
// can be sampled in any order (or concurrently) with reproducible results.
#pragma once

#include <cstdint>
#include <random>

namespace qent {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Key into a tree of independent RNG streams.
struct SeedKey {
    std::uint64_t value = 0;

    SeedKey child(std::uint64_t index) const {
        return SeedKey{splitmix64(value ^ (0x9E3779B97F4A7C15ull * (index + 1)))};
    }

    /// Engine for this node. mt19937_64 keeps draws reproducible for a
    /// given standard library; the stream layout itself is documented above.
    std::mt19937_64 engine() const { return std::mt19937_64(splitmix64(value)); }
};

/// Poisson draw that tolerates a zero or negative mean (no events).
inline std::int64_t poisson_draw(double mean, std::mt19937_64& eng) {
    if (!(mean > 0.0)) return 0;
    std::poisson_distribution<std::int64_t> d(mean);
    return d(eng);
}

}  // namespace qent
