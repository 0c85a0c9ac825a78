#pragma once

#include <cstdint>

namespace agcore {

// splitmix64 finalizer: invertible, full avalanche.
inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

// Counter-based stream: word `index` of the stream keyed by `seed`. Stateless,
// so any entry can be drawn in any order (or in parallel) with identical
// results. Equivalent to reading splitmix64 state h(seed) + index * gamma.
inline std::uint64_t stream_word(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t base = mix64(seed + 0x9E3779B97F4A7C15ULL);
    return mix64(base + index * 0x9E3779B97F4A7C15ULL);
}

// Word in [0,1) with 53 random bits.
inline double to_unit_double(std::uint64_t w) {
    return static_cast<double>(w >> 11) * 0x1.0p-53;
}

// Stateful generator for sampling tasks (random subsets in graph checks).
// Deterministic given the seed; market entries never use this.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    double next_unit() { return to_unit_double(next()); }

    // Unbiased integer in [0, bound), bound >= 1.
    std::uint64_t next_below(std::uint64_t bound) {
        std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t w = next();
            if (w >= threshold) return w % bound;
        }
    }

  private:
    std::uint64_t state_;
};

} // namespace agcore
