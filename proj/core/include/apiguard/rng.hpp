#pragma once

#include <cstdint>
#include <random>

namespace apiguard {

/// Deterministic RNG used everywhere randomness is needed.
///
/// Draws go through hand-rolled mappings instead of std distributions so
/// that a given seed produces the same stream on every standard library.
/// split() derives an independent child stream; workers each own a split
/// so parallel runs stay reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

    std::uint64_t nextU64() { return engine_(); }

    /// Uniform in [0, 1).
    double nextDouble() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, n). n must be > 0.
    std::size_t nextIndex(std::size_t n) {
        // rejection sampling to avoid modulo bias
        std::uint64_t bound = n;
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return static_cast<std::size_t>(x % bound);
    }

    bool nextBool(double p) { return nextDouble() < p; }

    /// Independent child stream; deterministic in (seed, streamId).
    Rng split(std::uint64_t streamId) const {
        return Rng(mix(seed_ ^ mix(streamId + 0x9e3779b97f4a7c15ull)));
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        // splitmix64 finalizer
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace apiguard
