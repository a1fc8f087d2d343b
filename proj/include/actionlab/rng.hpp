#pragma once

#include <cstdint>

namespace actionlab {

// splitmix64: tiny, fast, high-quality 64-bit generator with a documented
// algorithm (Steele/Lea/Vigna mixing constants). Chosen over <random> engines
// because the standard distributions are implementation-defined: this stream,
// and the uniform doubles derived from it, are bit-identical on every platform.
// The generator name "splitmix64" is part of the documented report contract.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    // Next raw 64-bit word.
    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1): top 53 bits scaled by 2^-53.
    double next_u01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform double in [-w, +w).
    double next_symmetric(double w) { return (2.0 * next_u01() - 1.0) * w; }

    std::uint64_t state() const { return state_; }

  private:
    std::uint64_t state_;
};

// Deterministic sub-seed derivation: hashing (seed, index) through the same
// mixer gives reproducible, well-separated child streams for auxiliary chains.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    SplitMix64 g(master ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
    return g.next_u64();
}

}  // namespace actionlab
