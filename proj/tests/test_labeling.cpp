#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include "support/partitions.hpp"
#include "succeq/error.hpp"
#include "succeq/labeling.hpp"
#include "succeq/partition.hpp"

using namespace succeq;
using namespace succeq::testing;

namespace {

// floor(lg n + lg lg n + 2) = floor(lg(4 n lg n)), computed in long double
// from the product rather than the sum.
unsigned bound_by_product(std::uint64_t n) {
    const long double v = 4.0L * n * std::log2(static_cast<long double>(n));
    return static_cast<unsigned>(std::floor(std::log2(v) + 1e-12L));
}

void check_range_labels(const ClassSizes& sizes) {
    const RangeLabelAssignment a = assign_range_labels(sizes);
    const std::uint64_t n = sizes.total();
    ASSERT_LE(a.max_label(), label_space_size(n));
    std::set<Label> distinct(a.labels().begin(), a.labels().end());
    ASSERT_EQ(distinct.size(), n);
    // Labels are emitted class by class; equivalence must follow class membership.
    std::vector<std::uint64_t> owner;
    for (std::size_t c = 0; c < a.ranges().size(); ++c) owner.insert(owner.end(), a.ranges()[c].size, c);
    for (std::size_t p = 0; p < a.labels().size(); p += 1 + p / 7)
        for (std::size_t q = 0; q < a.labels().size(); q += 1 + q / 5)
            ASSERT_EQ(a.equivalent(a.labels()[p], a.labels()[q]), owner[p] == owner[q]);
}

}  // namespace

TEST(RangeLabels, WorkedExample) {
    const RangeLabelAssignment a = assign_range_labels({{1, 1, 2, 5}});
    // floor(9/i) for i = 1..4 gives ranges of 9, 4, 3, 2.
    ASSERT_EQ(a.ranges().size(), 4u);
    EXPECT_EQ(a.ranges()[0].lo, 1u);
    EXPECT_EQ(a.ranges()[1].lo, 10u);
    EXPECT_EQ(a.ranges()[2].lo, 14u);
    EXPECT_EQ(a.ranges()[3].lo, 17u);
    EXPECT_EQ(a.max_label(), 17u);
    EXPECT_TRUE(range_labels_equivalent(a, 10, 11));
    EXPECT_FALSE(range_labels_equivalent(a, 5, 10));
    EXPECT_THROW(a.class_of(9), InvalidInput);  // inside class 1's range but unassigned
}

TEST(RangeLabels, BoundHoldsExhaustively) {
    for (std::uint64_t n = 1; n <= 12; ++n)
        for (const auto& sizes : enumerate_partitions(n)) check_range_labels(sizes);
}

TEST(RangeLabels, BoundHoldsForRandomPartitions) {
    std::mt19937_64 rng(41);
    for (std::uint64_t n : {100ull, 5000ull, 1ull << 14}) {
        for (int trial = 0; trial < 10; ++trial) {
            check_range_labels(random_partition(n, rng));
            check_range_labels(random_skewed_partition(n, rng));
        }
    }
    check_range_labels(singletons(1000));
}

TEST(BitLabels, BoundFormula) {
    EXPECT_EQ(label_length_bound(9), 6u);
    EXPECT_EQ(label_length_bound(1 << 10), 15u);
    EXPECT_EQ(label_length_bound(1 << 16), 22u);
    EXPECT_EQ(label_length_bound(1 << 20), 26u);
    for (std::uint64_t n = 2; n <= 100000; n += 1 + n / 100) ASSERT_EQ(label_length_bound(n), bound_by_product(n)) << n;
    EXPECT_THROW(label_length_bound(1), InvalidInput);
}

TEST(BitLabels, WorkedExample) {
    // n=9: prefix codes 0, 100, 101, 110, 111 for L = 0..4.
    EXPECT_EQ(to_string(encode_bit_label(9, 1, 3)), "00010");
    EXPECT_EQ(to_string(encode_bit_label(9, 2, 1)), "10000");
    EXPECT_EQ(to_string(encode_bit_label(9, 3, 1)), "101000");
    EXPECT_EQ(decode_bit_label(9, parse_bit_label("10000")), (ClassRank{2, 1}));
    EXPECT_EQ(encode_bit_label(1, 1, 1).length, 0u);
}

TEST(BitLabels, EveryLabelFitsAndRoundTrips) {
    for (std::uint64_t n = 2; n <= 600; ++n) {
        const BitLabelCodec codec(n);
        const unsigned bound = label_length_bound(n);
        std::vector<std::string> all;
        for (std::uint64_t i = 1; i <= n; ++i) {
            for (std::uint64_t j = 1; j <= n / i; ++j) {
                const BitLabel l = codec.encode(i, j);
                ASSERT_LE(l.length, bound) << n << " " << i << " " << j;
                ASSERT_EQ(codec.decode(l), (ClassRank{i, j}));
                if (n <= 150) all.push_back(to_string(l));
            }
        }
        // No label is a prefix of another, so labels are self-delimiting.
        std::sort(all.begin(), all.end());
        for (std::size_t t = 1; t < all.size(); ++t)
            ASSERT_NE(all[t].compare(0, all[t - 1].size(), all[t - 1]), 0) << n << " " << all[t - 1] << " " << all[t];
    }
}

TEST(BitLabels, LargeNExtremes) {
    for (std::uint64_t n : {1ull << 20, (1ull << 20) + 1, 1000003ull, 1ull << 32, (1ull << 40) - 1}) {
        const BitLabelCodec codec(n);
        const unsigned bound = label_length_bound(n);
        for (std::uint64_t i : std::vector<std::uint64_t>{1, 2, 3, 4, 5, 1000, n / 2, n / 2 + 1, n - 1, n}) {
            for (std::uint64_t j : std::vector<std::uint64_t>{1, n / i}) {
                const BitLabel l = codec.encode(i, j);
                ASSERT_LE(l.length, bound) << n << " " << i;
                ASSERT_EQ(codec.decode(l), (ClassRank{i, j}));
            }
        }
    }
}

TEST(BitLabels, LayoutLabelsMatchOracle) {
    for (std::uint64_t n = 1; n <= 10; ++n) {
        for (const auto& sizes : enumerate_partitions(n)) {
            const GroupSequence g = normalize(sizes);
            const NaiveOracle oracle(g);
            const auto labels = bit_labels_for_layout(g);
            const BitLabelCodec codec(n);
            for (Label x = 1; x <= n; ++x)
                for (Label y = 1; y <= n; ++y) ASSERT_EQ(codec.equivalent(labels[x - 1], labels[y - 1]), oracle.same_class(x, y));
        }
    }
}

TEST(BitLabels, RejectsMalformed) {
    const BitLabelCodec codec(9);
    EXPECT_THROW(parse_bit_label("0102"), ParseError);
    EXPECT_THROW(codec.decode(parse_bit_label("")), ParseError);
    EXPECT_THROW(codec.decode(parse_bit_label("1111111")), ParseError);
    EXPECT_THROW(codec.encode(2, 5), InvalidInput);
    EXPECT_THROW(codec.encode(10, 1), InvalidInput);
}
