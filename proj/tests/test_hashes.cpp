#include "doctest.h"

#include "branchlab/hashes.hpp"
#include "branchlab/rng.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

using namespace branchlab;
using namespace branchlab::hashes;

namespace {

// Shared probe inputs for all four mixers.
constexpr std::array<uint32_t, 6> kProbes = {
    0u, 1u, 0xDEADBEEFu, 0x12345678u, 0xFFFFFFFFu, 1234567u};

// Independent fold reference: XOR the value together in `width`-bit chunks,
// written differently from the production shift cascade.
uint64_t fold_reference(uint64_t x, int width) {
    uint64_t acc = 0;
    for (int shift = 0; shift < 64; shift += width) {
        acc ^= (x >> shift);
    }
    return acc & ((width == 64) ? ~uint64_t{0} : ((uint64_t{1} << width) - 1));
}

} // namespace

TEST_CASE("wang4shift matches frozen reference values") {
    constexpr std::array<uint32_t, 6> expected = {
        0xCAA3CAA3u, 0x12D60BF6u, 0x92DA7565u,
        0xC7E424BAu, 0xBD55FC18u, 0x5965C124u};
    for (size_t i = 0; i < kProbes.size(); ++i) {
        CAPTURE(kProbes[i]);
        CHECK(wang4shift(kProbes[i]) == expected[i]);
    }
}

TEST_CASE("wang3shift matches frozen reference values") {
    constexpr std::array<uint32_t, 6> expected = {
        0xC0A9496Au, 0x27922C9Du, 0x572E7C2Du,
        0x45ADCDD4u, 0x70F499D3u, 0xECA3815Au};
    for (size_t i = 0; i < kProbes.size(); ++i) {
        CAPTURE(kProbes[i]);
        CHECK(wang3shift(kProbes[i]) == expected[i]);
    }
}

TEST_CASE("jenkins32 matches frozen reference values") {
    constexpr std::array<uint32_t, 6> expected = {
        0x6B4ED927u, 0xB48681B6u, 0x7FF0EADAu,
        0x027C5489u, 0xFE64C182u, 0x24BA2F44u};
    for (size_t i = 0; i < kProbes.size(); ++i) {
        CAPTURE(kProbes[i]);
        CHECK(jenkins32(kProbes[i]) == expected[i]);
    }
}

TEST_CASE("hash7shift matches frozen reference values") {
    constexpr std::array<uint32_t, 6> expected = {
        0x00000000u, 0xC2B73583u, 0x217A06C4u,
        0x2976C9A2u, 0xD5866458u, 0xFACDC3A9u};
    for (size_t i = 0; i < kProbes.size(); ++i) {
        CAPTURE(kProbes[i]);
        CHECK(hash7shift(kProbes[i]) == expected[i]);
    }
}

TEST_CASE("folded_xor known values") {
    CHECK(folded_xor(0x1234, 16) == 0x1234u);
    CHECK(folded_xor(0xFFFF0000FFFF0000ull, 16) == 0u);
    CHECK(folded_xor(0x123456789ABCDEF0ull, 16) == 0u);
    CHECK(folded_xor(0x123456789ABCDEF0ull, 32) == 0x88888888u);
    CHECK(folded_xor(0xA5A5A5A5A5A5A5A5ull, 8) == 0u);
    CHECK(folded_xor(0, 8) == 0u);
    CHECK(folded_xor(~uint64_t{0}, 32) == 0u);
}

TEST_CASE("folded_xor rejects unsupported widths") {
    CHECK_THROWS_AS(folded_xor(1, 7), std::invalid_argument);
    CHECK_THROWS_AS(folded_xor(1, 0), std::invalid_argument);
    CHECK_THROWS_AS(folded_xor(1, 64), std::invalid_argument);
    CHECK_THROWS_AS(folded_xor(1, 24), std::invalid_argument);
}

TEST_CASE("folded_xor agrees with chunked reference on random inputs") {
    SplitMix64 rng(0x10151ull);
    for (int i = 0; i < 20000; ++i) {
        uint64_t x = rng.next();
        for (int width : {8, 16, 32}) {
            CAPTURE(x);
            CAPTURE(width);
            CHECK(folded_xor(x, width) == fold_reference(x, width));
        }
    }
}

TEST_CASE("four_hybrid12 matches frozen reference values") {
    constexpr std::array<uint32_t, 6> expected = {184u, 236u, 159u, 222u, 78u, 185u};
    for (size_t i = 0; i < kProbes.size(); ++i) {
        CAPTURE(kProbes[i]);
        CHECK(four_hybrid12(kProbes[i], 256) == expected[i]);
    }
}

TEST_CASE("four_hybrid12 stays within the table and composes the four mixers") {
    CHECK(four_hybrid12(12345, 1) == 0u);
    SplitMix64 rng(0x20252ull);
    for (int i = 0; i < 10000; ++i) {
        uint32_t x = static_cast<uint32_t>(rng.next());
        for (uint32_t size : {2u, 16u, 256u, 4096u}) {
            uint32_t idx = four_hybrid12(x, size);
            CHECK(idx < size);
            CHECK(idx == ((jenkins32(wang4shift(x)) ^ hash7shift(wang3shift(x))) & (size - 1)));
        }
    }
}

TEST_CASE("mixers avalanche: flipping one input bit flips about half the output") {
    // Quick screen; the long-run statistical version lives in the acceptance
    // suite.  Mean flipped output bits over random (input, bit) pairs should
    // sit near 16 out of 32.
    struct Named {
        const char* name;
        uint32_t (*fn)(uint32_t);
    };
    const Named mixers[] = {
        {"wang4shift", wang4shift},
        {"wang3shift", wang3shift},
        {"jenkins32", jenkins32},
        {"hash7shift", hash7shift},
    };
    for (const auto& m : mixers) {
        CAPTURE(m.name);
        SplitMix64 rng(0x30353ull);
        const int trials = 20000;
        uint64_t total_flips = 0;
        for (int i = 0; i < trials; ++i) {
            uint32_t x = static_cast<uint32_t>(rng.next());
            uint32_t bit = static_cast<uint32_t>(rng.next_below(32));
            uint32_t a = m.fn(x);
            uint32_t b = m.fn(x ^ (1u << bit));
            total_flips += std::popcount(a ^ b);
        }
        double mean = static_cast<double>(total_flips) / trials;
        CHECK(mean > 12.8);
        CHECK(mean < 19.2);
    }
}

TEST_CASE("four_hybrid12 spreads sequential keys roughly uniformly") {
    const uint32_t buckets = 256;
    const uint32_t keys = 200000;
    std::vector<uint32_t> counts(buckets, 0);
    for (uint32_t k = 0; k < keys; ++k) {
        ++counts[four_hybrid12(k, buckets)];
    }
    const double mean = static_cast<double>(keys) / buckets;
    for (uint32_t b = 0; b < buckets; ++b) {
        CAPTURE(b);
        CHECK(counts[b] > mean * 0.85);
        CHECK(counts[b] < mean * 1.15);
    }
}

TEST_CASE("is_pow2 basics") {
    CHECK(is_pow2(1u));
    CHECK(is_pow2(2u));
    CHECK(is_pow2(1u << 20));
    CHECK_FALSE(is_pow2(0u));
    CHECK_FALSE(is_pow2(3u));
    CHECK_FALSE(is_pow2(12u));
}

TEST_CASE("SplitMix64 is deterministic and next_double is in [0,1)") {
    SplitMix64 a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        CHECK(a.next() == b.next());
    }
    SplitMix64 c(7);
    for (int i = 0; i < 1000; ++i) {
        double d = c.next_double();
        CHECK(d >= 0.0);
        CHECK(d < 1.0);
    }
    SplitMix64 e(9);
    for (int i = 0; i < 1000; ++i) {
        CHECK(e.next_below(17) < 17u);
    }
}
