#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace minsteg {

// 64-bit linear congruential generator with Knuth's MMIX constants:
//
//   state' = state * 6364136223846793005 + 1442695040888963407
//
// A single bit draw is the top bit of the advanced state. Every source of
// randomness in this project (payload padding, synthetic templates,
// perturbations, evaluation payloads) flows through this generator, so a
// given seed reproduces results bit for bit.
class Lcg64 {
public:
    static constexpr std::uint64_t kMult = 6364136223846793005ULL;
    static constexpr std::uint64_t kInc = 1442695040888963407ULL;

    explicit Lcg64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ = state_ * kMult + kInc;
        return state_;
    }

    bool next_bit() { return (next_u64() >> 63) != 0; }

    // Uniform in [0, n) via multiply-shift on the high 32 bits; n >= 1.
    std::uint32_t next_below(std::uint32_t n) {
        return static_cast<std::uint32_t>(((next_u64() >> 32) * n) >> 32);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal, Box-Muller; the second value of each pair is cached.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_unit();
        while (u1 == 0.0) u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Deterministic child seed for an independent stream of a master seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    Lcg64 g(seed);
    Lcg64 h(g.next_u64() ^ stream);
    h.next_u64();
    return h.next_u64();
}

}  // namespace minsteg
