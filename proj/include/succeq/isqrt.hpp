#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "succeq/bits.hpp"
#include "succeq/partition.hpp"
#include "succeq/probe.hpp"

namespace succeq {

/// Index of the highest set bit (floor(lg i)); one count-leading-zeros instruction.
inline unsigned msb_index(std::uint64_t i) {
    if (i == 0) throw InvalidInput("msb of zero");
    return floor_lg(i);
}

/// Table-driven ceil(sqrt(i)) for 1 <= i <= max_arg.
///
/// Write i = a * 2^h + b with r = floor(lg i), h = ceil(r / 2), b < 2^h, so a
/// keeps the top floor(r/2) + 1 bits of i including the leading one. Then
/// ceil(sqrt(a 2^h)) <= ceil(sqrt(i)) <= ceil(sqrt((a+1) 2^h)) and the two ends
/// differ by at most one. Arguments of even bit-length read table E, odd
/// bit-length read table O.
///
/// Each table is a concatenation of segments, one per bit-length of a. The
/// segment for bit-length m holds a = 2^(m-1) .. 2^m, the top entry being the
/// upper candidate for a = 2^m - 1 evaluated at that segment's h. Segments are
/// laid out back to back so a lives at slot a + m - 2 and its upper candidate
/// is always the next slot.
class SqrtTables {
public:
    SqrtTables() = default;

    /// Tables for arguments up to 2n; validated exhaustively against an
    /// independent integer square root.
    static SqrtTables build(std::uint64_t n) {
        if (n < 1) throw InvalidInput("n must be positive");
        SqrtTables t = build_for_max(2 * n);
        t.validate();
        return t;
    }

    static SqrtTables build_for_max(std::uint64_t max_arg) {
        if (max_arg < 1) throw InvalidInput("max argument must be positive");
        std::vector<std::uint64_t> even, odd;
        const unsigned top = floor_lg(max_arg);
        for (unsigned r = 0; r <= top; ++r) {
            const unsigned h = (r + 1) / 2;
            const unsigned m = r - h + 1;
            const std::uint64_t lo = std::uint64_t{1} << (m - 1);
            const std::uint64_t hi = r < top ? (std::uint64_t{1} << m) - 1 : (max_arg >> h);
            auto& table = ((r + 1) % 2 == 0) ? even : odd;
            for (std::uint64_t a = lo; a <= hi + 1; ++a) {
                const std::uint64_t slot = a + m - 2;
                if (table.size() <= slot) table.resize(slot + 1, 0);
                table[slot] = ceil_sqrt_reference(a << h);
            }
        }
        SqrtTables t;
        t.max_arg_ = max_arg;
        t.even_ = PackedArray::from(even);
        t.odd_ = PackedArray::from(odd);
        return t;
    }

    static SqrtTables from_parts(std::uint64_t max_arg, PackedArray even, PackedArray odd) {
        SqrtTables expect = build_for_max(max_arg);
        if (!(expect.even_ == even) || !(expect.odd_ == odd))
            throw ParseError("square-root tables do not match the argument range");
        SqrtTables t;
        t.max_arg_ = max_arg;
        t.even_ = std::move(even);
        t.odd_ = std::move(odd);
        return t;
    }

    std::uint64_t max_arg() const noexcept { return max_arg_; }

    std::uint64_t ceil_sqrt(std::uint64_t i) const {
        if (i < 1 || i > max_arg_) throw InvalidInput("square-root argument out of table range");
        const auto [table, slot] = locate(i);
        const std::uint64_t low = (*table)[slot];
        if (low * low >= i) return low;
        return (*table)[slot + 1];
    }

    /// The two table candidates consulted for i.
    std::pair<std::uint64_t, std::uint64_t> candidates(std::uint64_t i) const {
        if (i < 1 || i > max_arg_) throw InvalidInput("square-root argument out of table range");
        const auto [table, slot] = locate(i);
        return {table->raw(slot), table->raw(slot + 1)};
    }

    /// Throws std::logic_error if any argument in range maps to a wrong root.
    void validate() const {
        std::uint64_t root = 1;
        for (std::uint64_t i = 1; i <= max_arg_; ++i) {
            while (root * root < i) ++root;
            const auto [lo, hi] = candidates(i);
            const std::uint64_t got = lo * lo >= i ? lo : hi;
            if (got != root || (lo != root && hi != root))
                throw std::logic_error("square-root table fails at " + std::to_string(i));
        }
    }

    const PackedArray& even_table() const noexcept { return even_; }
    const PackedArray& odd_table() const noexcept { return odd_; }

    std::uint64_t space_bits() const noexcept { return even_.space_bits() + odd_.space_bits() + 64; }

private:
    std::pair<const PackedArray*, std::uint64_t> locate(std::uint64_t i) const noexcept {
        const unsigned r = floor_lg(i);
        const unsigned h = (r + 1) / 2;
        const std::uint64_t a = i >> h;
        const unsigned m = r - h + 1;
        return {((r + 1) % 2 == 0) ? &even_ : &odd_, a + m - 2};
    }

    std::uint64_t max_arg_ = 0;
    PackedArray even_;
    PackedArray odd_;
};

}  // namespace succeq
