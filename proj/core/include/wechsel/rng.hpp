#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace wechsel {

// splitmix64 finalizer; full 64-bit avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Counter-based generator: the output is a pure function of (seed, a, b, c),
// so parallel row computation gives identical bytes at any thread count.
inline std::uint64_t key_hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                              std::uint64_t c) {
    std::uint64_t h = mix64(seed + kGolden);
    h = mix64(h ^ (a + kGolden));
    h = mix64(h ^ (b + kGolden));
    h = mix64(h ^ (c + kGolden));
    return h;
}

// Map to (0, 1]: never zero, safe under log().
inline double unit_open(std::uint64_t x) {
    return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

// Map to [0, 1).
inline double unit_half_open(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Standard normal keyed by (seed, a, b); Box-Muller on two derived streams.
inline double normal_from_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    double u1 = unit_open(key_hash(seed, a, b, 0));
    double u2 = unit_half_open(key_hash(seed, a, b, 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Unbiased-enough bounded draw (multiply-shift; bias < 2^-64 * n).
inline std::uint64_t bounded_from_u64(std::uint64_t x, std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(x) * static_cast<unsigned __int128>(n)) >> 64);
}

// Sequential stream for fixture generation. Not for per-row parallel
// sampling; use key_hash/normal_from_key there.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += kGolden;
        return mix64(state_);
    }

    double next_unit() { return unit_half_open(next_u64()); }

    double next_normal() {
        double u1 = unit_open(next_u64());
        double u2 = unit_half_open(next_u64());
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Uniform in [0, n).
    std::uint64_t next_index(std::uint64_t n) { return bounded_from_u64(next_u64(), n); }

private:
    std::uint64_t state_;
};

}  // namespace wechsel
