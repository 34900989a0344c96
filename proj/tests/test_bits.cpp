#include <gtest/gtest.h>

#include <algorithm>
#include <optional>
#include <random>
#include <vector>

#include "succeq/bits.hpp"
#include "succeq/bitvector.hpp"
#include "succeq/error.hpp"
#include "succeq/probe.hpp"
#include "succeq/radix_sort.hpp"

using namespace succeq;

TEST(Bits, WidthHelpers) {
    EXPECT_EQ(bit_width(0), 0u);
    EXPECT_EQ(bit_width(1), 1u);
    EXPECT_EQ(bit_width(255), 8u);
    EXPECT_EQ(bit_width(256), 9u);
    EXPECT_EQ(ceil_lg(1), 0u);
    EXPECT_EQ(ceil_lg(2), 1u);
    EXPECT_EQ(ceil_lg(5), 3u);
    EXPECT_EQ(ceil_lg(8), 3u);
    EXPECT_EQ(floor_lg(1), 0u);
    EXPECT_EQ(floor_lg(9), 3u);
    EXPECT_EQ(low_mask(64), ~std::uint64_t{0});
}

TEST(Bits, ReadWriteAcrossWordBoundaries) {
    std::mt19937_64 rng(7);
    for (unsigned width = 1; width <= 64; ++width) {
        std::vector<std::uint64_t> values(200);
        for (auto& v : values) v = rng() & low_mask(width);
        const PackedArray a = PackedArray::with_width(values, width);
        ASSERT_EQ(a.width(), width);
        for (std::size_t i = 0; i < values.size(); ++i) ASSERT_EQ(a.raw(i), values[i]) << width << " " << i;
        EXPECT_EQ(a.to_vector(), values);
        EXPECT_EQ(a.space_bits(), values.size() * width);
    }
}

TEST(Bits, PackedArrayMinimalWidth) {
    const std::vector<std::uint64_t> v{0, 3, 9, 1};
    EXPECT_EQ(PackedArray::from(v).width(), 4u);
    EXPECT_EQ(PackedArray::from(std::vector<std::uint64_t>{0, 0}).size(), 2u);
    EXPECT_THROW(PackedArray::from_words(10, 8, {0}), ParseError);
}

TEST(Bits, PackedArraySetAndProbes) {
    PackedArray a(10, 5);
    a.set(3, 17);
    a.set(4, 31);
    probe::Scope scope;
    EXPECT_EQ(a[3], 17u);
    EXPECT_EQ(a[4], 31u);
    EXPECT_EQ(a.raw(0), 0u);
    EXPECT_EQ(scope.count(), 2u);
}

TEST(Bits, BitWriterAppends) {
    BitWriter w;
    w.append(0b101, 3);
    w.push_back(true);
    w.append(0xffff, 16);
    EXPECT_EQ(w.size(), 20u);
    EXPECT_EQ(read_bits(w.words(), 0, 3), 0b101u);
    EXPECT_EQ(read_bits(w.words(), 3, 1), 1u);
    EXPECT_EQ(read_bits(w.words(), 4, 16), 0xffffu);
}

namespace {

void check_against_scan(const std::vector<bool>& bits) {
    const BitVector bv(bits);
    ASSERT_EQ(bv.size(), bits.size());
    std::uint64_t ones = 0;
    std::vector<std::uint64_t> positions;
    ASSERT_EQ(bv.rank1(0), 0u);
    for (std::uint64_t i = 1; i <= bits.size(); ++i) {
        if (bits[i - 1]) {
            ++ones;
            positions.push_back(i);
        }
        ASSERT_EQ(bv.get(i), bits[i - 1]);
        ASSERT_EQ(bv.rank1(i), ones) << i;
    }
    ASSERT_EQ(bv.ones(), ones);
    for (std::uint64_t j = 1; j <= ones; ++j) ASSERT_EQ(bv.select1(j), positions[j - 1]) << j;
    EXPECT_FALSE(bv.select1(ones + 1).has_value());
    EXPECT_FALSE(bv.select1(0).has_value());
    // next_one(p) is select1(rank1(p) + 1).
    for (std::uint64_t p = 0; p <= bits.size(); p += 1 + p / 64) {
        const std::uint64_t r = p ? bv.rank1(p) : 0;
        ASSERT_EQ(bv.next_one(p), r < ones ? std::optional<std::uint64_t>(positions[r]) : std::nullopt) << p;
    }
    EXPECT_EQ(bv.to_bits(), bits);
}

}  // namespace

TEST(BitVector, RankSelectMatchLinearScan) {
    std::mt19937_64 rng(11);
    for (double density : {0.0, 0.001, 0.01, 0.1, 0.5, 0.9, 1.0}) {
        for (std::size_t len : {0u, 1u, 63u, 64u, 65u, 511u, 512u, 513u, 5000u, 40000u}) {
            std::bernoulli_distribution coin(density);
            std::vector<bool> bits(len);
            for (std::size_t i = 0; i < len; ++i) bits[i] = coin(rng);
            check_against_scan(bits);
        }
    }
}

TEST(BitVector, SparseAndClusteredSelect) {
    // Long gaps force sparse select blocks; a dense tail keeps dense ones too.
    std::vector<bool> bits(100000, false);
    for (std::size_t i = 0; i < 100000; i += 997) bits[i] = true;
    for (std::size_t i = 90000; i < 92000; ++i) bits[i] = true;
    check_against_scan(bits);
}

TEST(BitVector, ValidatesWordsAndPositions) {
    EXPECT_THROW(BitVector(std::vector<std::uint64_t>{0, 0}, 64), InvalidInput);
    EXPECT_THROW(BitVector(std::vector<std::uint64_t>{~std::uint64_t{0}}, 10), InvalidInput);
    const BitVector bv(std::vector<bool>{true, false, true});
    EXPECT_THROW(bv.rank1(4), InvalidInput);
    EXPECT_EQ(bv, BitVector(std::vector<std::uint64_t>{0b101}, 3));
}

TEST(BitVector, SpaceIncludesDirectories) {
    const BitVector bv(std::vector<bool>(10000, true));
    EXPECT_EQ(bv.space_bits(), 10000 + bv.directory_bits());
    EXPECT_GT(bv.directory_bits(), 128u);
}

TEST(RadixSort, StableAndMatchesStdStableSort) {
    std::mt19937_64 rng(3);
    for (std::uint64_t max_key : {1ull, 7ull, 1000ull, 1ull << 20, 123456789ull}) {
        std::vector<std::pair<std::uint64_t, int>> items(3000);
        for (int i = 0; i < 3000; ++i) items[i] = {rng() % (max_key + 1), i};
        auto expect = items;
        std::stable_sort(expect.begin(), expect.end(), [](auto& a, auto& b) { return a.first < b.first; });
        radix_sort(items, [](const auto& p) { return p.first; }, max_key);
        EXPECT_EQ(items, expect) << max_key;
    }
}
