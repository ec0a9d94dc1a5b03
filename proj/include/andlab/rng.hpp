#pragma once

#include <cstdint>

namespace andlab {

// All randomness in the library derives from the splitmix64 finalizer.
// Child streams (per realization, per site) are opened at fixed offsets of
// the golden-ratio increment, so every drawn value is a pure function of
// (master seed, index) and never of evaluation order or thread count.

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Deterministic child seed for work item `index` under `master`.
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master + kGolden * (index + 1));
}

/// Map a 64-bit word to a double in [0, 1).
inline double unit_double(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Uniform [0,1) draw number `index` of the stream keyed by `seed`.
inline double unit_draw(std::uint64_t seed, std::uint64_t index) {
    return unit_double(child_seed(seed, index));
}

/// Sequential splitmix64 stream for places where a running generator is the
/// natural shape (shuffles, rejection loops).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        state_ += kGolden;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double next_unit() { return unit_double(next()); }
    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return next() % n; }

private:
    std::uint64_t state_;
};

}  // namespace andlab
