#pragma once

#include <cstdint>

namespace branchlab {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen over std::mt19937 because the
// sequence is pinned by these few lines: results stay byte-identical across
// standard libraries and platforms, which the artifact-determinism guarantee
// relies on.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, bound). Modulo bias is irrelevant at the bounds used here
  // (all far below 2^63), and keeping it branch-free keeps it reproducible.
  std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }

 private:
  std::uint64_t state_;
};

}  // namespace branchlab
