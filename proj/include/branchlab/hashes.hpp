#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>

namespace branchlab::hashes {

// Integer mixers used by the hashed predictor index schemes. All arithmetic
// is mod 2^32 (unsigned wraparound).

constexpr std::uint32_t wang4shift(std::uint32_t x) {
  x = ~x + (x << 15);
  x = x ^ (x >> 12);
  x = x + (x << 2);
  x = x ^ (x >> 4);
  x = x * 2057u;
  x = x ^ (x >> 16);
  return x;
}

constexpr std::uint32_t wang3shift(std::uint32_t x) {
  x = (x ^ 61u) ^ (x >> 16);
  x = x + (x << 3);
  x = x ^ (x >> 4);
  x = x * 0x27d4eb2du;
  x = x ^ (x >> 15);
  return x;
}

constexpr std::uint32_t jenkins32(std::uint32_t x) {
  x = (x + 0x7ed55d16u) + (x << 12);
  x = (x ^ 0xc761c23cu) ^ (x >> 19);
  x = (x + 0x165667b1u) + (x << 5);
  x = (x + 0xd3a2646cu) ^ (x << 9);
  x = (x + 0xfd7046c5u) + (x << 3);
  x = (x ^ 0xb55a4f09u) ^ (x >> 16);
  return x;
}

constexpr std::uint32_t hash7shift(std::uint32_t x) {
  x = x - (x << 6);
  x = x ^ (x >> 17);
  x = x - (x << 9);
  x = x ^ (x << 4);
  x = x - (x << 3);
  x = x ^ (x << 10);
  x = x ^ (x >> 15);
  return x;
}

// XOR-folds a 64-bit value down to `width` bits (8, 16 or 32).
inline std::uint64_t folded_xor(std::uint64_t x, unsigned width) {
  if (width != 8 && width != 16 && width != 32)
    throw std::invalid_argument("folded_xor: width must be 8, 16 or 32");
  std::uint64_t folded = 0;
  for (unsigned shift = 0; shift < 64; shift += width)
    folded ^= x >> shift;
  return folded & ((1ULL << width) - 1);
}

// Hybrid of two mixer pipelines; the XOR of the two keeps either pipeline's
// weak spots from showing through. table_size must be a power of two.
constexpr std::uint32_t four_hybrid12(std::uint32_t x, std::uint32_t table_size) {
  std::uint32_t a = jenkins32(wang4shift(x));
  std::uint32_t b = hash7shift(wang3shift(x));
  return (a ^ b) & (table_size - 1);
}

constexpr bool is_pow2(std::uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

}  // namespace branchlab::hashes
