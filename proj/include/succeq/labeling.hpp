#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "succeq/bits.hpp"
#include "succeq/error.hpp"
#include "succeq/partition.hpp"

namespace succeq {

// ---------------------------------------------------------------------------
// Integer range labels: the i-th largest class draws its labels from a private
// range of floor(n/i) integers, so the largest label never exceeds
// sum_{i<=c} floor(n/i).

struct ClassRange {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    std::uint64_t size = 0;  // labels lo .. lo+size-1 are assigned
};

class RangeLabelAssignment {
public:
    RangeLabelAssignment() = default;

    explicit RangeLabelAssignment(const ClassSizes& input) {
        if (input.sizes.empty()) throw InvalidInput("empty class-size list");
        std::vector<std::uint64_t> sizes = input.sizes;
        std::sort(sizes.begin(), sizes.end(), std::greater<>());
        if (sizes.back() == 0) throw InvalidInput("class size must be positive");
        for (auto s : sizes) n_ += s;
        std::uint64_t next = 1;
        for (std::uint64_t i = 1; i <= sizes.size(); ++i) {
            const std::uint64_t width = n_ / i;
            if (sizes[i - 1] > width) throw std::logic_error("i-th largest class exceeds floor(n/i)");
            ranges_.push_back({next, next + width - 1, sizes[i - 1]});
            for (std::uint64_t r = 0; r < sizes[i - 1]; ++r) labels_.push_back(next + r);
            next += width;
        }
    }

    std::uint64_t n() const noexcept { return n_; }
    const std::vector<ClassRange>& ranges() const noexcept { return ranges_; }

    /// Labels in class order (largest class first), ranks ascending within a class.
    const std::vector<Label>& labels() const noexcept { return labels_; }

    Label max_label() const noexcept { return labels_.empty() ? 0 : labels_.back(); }

    /// 1-based class index (by nonincreasing size) owning label x.
    std::uint64_t class_of(Label x) const {
        const auto it = std::upper_bound(ranges_.begin(), ranges_.end(), x,
                                         [](Label v, const ClassRange& r) { return v < r.lo; });
        if (it == ranges_.begin()) throw InvalidInput("label not assigned");
        const ClassRange& r = *(it - 1);
        if (x >= r.lo + r.size) throw InvalidInput("label not assigned");
        return static_cast<std::uint64_t>(it - ranges_.begin());
    }

    bool equivalent(Label x, Label y) const { return class_of(x) == class_of(y); }

private:
    std::uint64_t n_ = 0;
    std::vector<ClassRange> ranges_;
    std::vector<Label> labels_;
};

inline RangeLabelAssignment assign_range_labels(const ClassSizes& sizes) { return RangeLabelAssignment(sizes); }

inline bool range_labels_equivalent(const RangeLabelAssignment& a, Label x, Label y) { return a.equivalent(x, y); }

// ---------------------------------------------------------------------------
// Bit labels: prefix(L) || class field (max(0, L-1) bits) || rank field
// (ceil(lg floor(n/i)) bits, value j-1), with L = ceil(lg i).
// i is the class index by nonincreasing size, j the rank inside the class.
// L pins i to (2^(L-1), 2^L], so the class field stores only the offset.
// The prefix names L with a canonical prefix-free code that depends only on n.
// Code lengths are chosen per L so that every label fits the
// floor(lg n + lg lg n + 2) bound.

struct BitLabel {
    std::uint64_t bits = 0;  // the label occupies the low `length` bits, MSB first
    unsigned length = 0;

    friend bool operator==(const BitLabel&, const BitLabel&) = default;
};

inline std::string to_string(const BitLabel& label) {
    std::string s(label.length, '0');
    for (unsigned b = 0; b < label.length; ++b)
        if ((label.bits >> (label.length - 1 - b)) & 1) s[b] = '1';
    return s;
}

inline BitLabel parse_bit_label(std::string_view text) {
    if (text.size() > 64) throw ParseError("bit label longer than 64 bits");
    BitLabel label;
    for (char ch : text) {
        if (ch != '0' && ch != '1') throw ParseError("bit label must be a binary string");
        label.bits = (label.bits << 1) | static_cast<std::uint64_t>(ch == '1');
    }
    label.length = static_cast<unsigned>(text.size());
    return label;
}

struct ClassRank {
    std::uint64_t cls = 0;   // i
    std::uint64_t rank = 0;  // j
    friend bool operator==(const ClassRank&, const ClassRank&) = default;
};

/// floor(lg n + lg lg n + 2) for n >= 2.
inline unsigned label_length_bound(std::uint64_t n) {
    if (n < 2) throw InvalidInput("label bound needs n >= 2");
    const long double lg = std::log2(static_cast<long double>(n));
    return static_cast<unsigned>(std::floor(lg + std::log2(lg) + 2.0L + 1e-12L));
}

class BitLabelCodec {
public:
    static constexpr std::uint64_t kMaxN = std::uint64_t{1} << 48;

    explicit BitLabelCodec(std::uint64_t n) : n_(n) {
        if (n < 1 || n > kMaxN) throw InvalidInput("label codec n out of range");
        const unsigned symbols = ceil_lg(n) + 1;  // L = 0 .. ceil(lg n)
        code_len_.assign(symbols, 0);
        code_.assign(symbols, 0);
        if (n == 1) return;  // only (1,1): the empty label

        const unsigned bound = label_length_bound(n);
        std::vector<unsigned> allowed(symbols);
        for (unsigned L = 0; L < symbols; ++L) {
            const unsigned used = class_field_bits(L) + ceil_lg(n / class_base(L));
            if (used > bound) throw std::logic_error("label fields alone exceed the length bound");
            allowed[L] = bound - used;
        }
        // Kraft sums in units of 2^-scale.
        const unsigned scale = *std::max_element(allowed.begin(), allowed.end());
        auto weight = [&](unsigned len) { return static_cast<unsigned __int128>(1) << (scale - len); };
        unsigned __int128 total = 0;
        for (unsigned L = 0; L < symbols; ++L) {
            code_len_[L] = allowed[L];
            total += weight(allowed[L]);
        }
        const unsigned __int128 one = static_cast<unsigned __int128>(1) << scale;
        if (total > one) throw std::logic_error("no prefix code meets the label length bound");
        // Shorten codes greedily, smallest L first, while the code stays prefix-free.
        for (unsigned L = 0; L < symbols; ++L)
            while (code_len_[L] > 0 && total + weight(code_len_[L]) <= one) {
                total += weight(code_len_[L]);  // halving the length doubles the weight
                --code_len_[L];
            }
        assign_canonical_codes();
    }

    std::uint64_t n() const noexcept { return n_; }

    /// Prefix code length for a class field of L bits.
    unsigned prefix_length(unsigned L) const { return code_len_.at(L); }

    static unsigned class_bits(std::uint64_t i) noexcept { return ceil_lg(i); }
    static unsigned class_field_bits(unsigned L) noexcept { return L ? L - 1 : 0; }
    /// Smallest i with ceil(lg i) == L.
    static std::uint64_t class_base(unsigned L) noexcept { return L ? (std::uint64_t{1} << (L - 1)) + 1 : 1; }
    unsigned rank_bits(std::uint64_t i) const noexcept { return ceil_lg(n_ / i); }

    BitLabel encode(std::uint64_t i, std::uint64_t j) const {
        if (i < 1 || i > n_) throw InvalidInput("class index out of range");
        if (j < 1 || j > n_ / i) throw InvalidInput("rank exceeds floor(n/i)");
        const unsigned L = class_bits(i);
        BitLabel out;
        append(out, code_[L], code_len_[L]);
        append(out, i - class_base(L), class_field_bits(L));
        append(out, j - 1, rank_bits(i));
        return out;
    }

    ClassRank decode(const BitLabel& label) const {
        if (label.length > 64) throw ParseError("bit label longer than 64 bits");
        const std::optional<unsigned> L = decode_prefix(label);
        if (!L) throw ParseError("bit label prefix is not a valid length code");
        const unsigned head = code_len_[*L] + class_field_bits(*L);
        if (head > label.length) throw ParseError("bit label shorter than its class field");
        const std::uint64_t i = take(label, code_len_[*L], class_field_bits(*L)) + class_base(*L);
        if (i > n_) throw ParseError("class field exceeds n");
        if (head + rank_bits(i) != label.length) throw ParseError("bit label length inconsistent with its prefix");
        const std::uint64_t j = take(label, head, rank_bits(i)) + 1;
        if (j > n_ / i) throw ParseError("rank field exceeds floor(n/i)");
        return {i, j};
    }

    bool equivalent(const BitLabel& a, const BitLabel& b) const { return decode(a).cls == decode(b).cls; }

private:
    static void append(BitLabel& label, std::uint64_t value, unsigned width) {
        if (width == 0) return;
        label.bits = (label.bits << width) | (value & low_mask(width));
        label.length += width;
    }

    static std::uint64_t take(const BitLabel& label, unsigned from, unsigned width) {
        if (width == 0) return 0;
        return (label.bits >> (label.length - from - width)) & low_mask(width);
    }

    void assign_canonical_codes() {
        std::vector<unsigned> order(code_len_.size());
        for (unsigned s = 0; s < order.size(); ++s) order[s] = s;
        std::stable_sort(order.begin(), order.end(), [&](unsigned a, unsigned b) { return code_len_[a] < code_len_[b]; });
        std::uint64_t code = 0;
        unsigned prev_len = code_len_[order.front()];
        first_.clear();
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            const unsigned s = order[pos];
            if (pos > 0) {
                ++code;
                code <<= (code_len_[s] - prev_len);
            }
            prev_len = code_len_[s];
            code_[s] = code;
            if (first_.empty() || first_.back().len != code_len_[s]) first_.push_back({code_len_[s], code, pos});
        }
        order_ = std::move(order);
    }

    std::optional<unsigned> decode_prefix(const BitLabel& label) const {
        if (n_ == 1) return 0;
        for (std::size_t t = 0; t < first_.size(); ++t) {
            const Run& run = first_[t];
            if (run.len > label.length) break;
            const std::size_t end = t + 1 < first_.size() ? first_[t + 1].pos : order_.size();
            const std::uint64_t head = take(label, 0, run.len);
            if (head >= run.code && head - run.code < end - run.pos) return order_[run.pos + (head - run.code)];
        }
        return std::nullopt;
    }

    struct Run {
        unsigned len;
        std::uint64_t code;  // first canonical code of this length
        std::size_t pos;     // its position in order_
    };

    std::uint64_t n_;
    std::vector<unsigned> code_len_;
    std::vector<std::uint64_t> code_;
    std::vector<unsigned> order_;
    std::vector<Run> first_;
};

inline BitLabel encode_bit_label(std::uint64_t n, std::uint64_t i, std::uint64_t j) { return BitLabelCodec(n).encode(i, j); }

inline ClassRank decode_bit_label(std::uint64_t n, const BitLabel& label) { return BitLabelCodec(n).decode(label); }

inline bool bit_labels_equivalent(const BitLabel& a, const BitLabel& b, std::uint64_t n) {
    return BitLabelCodec(n).equivalent(a, b);
}

/// (class index by nonincreasing size, rank) for every label 1..n of a layout.
inline std::vector<ClassRank> class_ranks_for_layout(const GroupSequence& g) {
    // Groups by descending size; classes of a group keep their layout order.
    std::vector<std::size_t> by_size(g.k());
    for (std::size_t i = 0; i < by_size.size(); ++i) by_size[i] = i + 1;
    std::sort(by_size.begin(), by_size.end(), [&](auto a, auto b) { return g.group(a).size > g.group(b).size; });
    std::vector<std::uint64_t> before(g.k() + 1, 0);
    std::uint64_t running = 0;
    for (auto gi : by_size) {
        before[gi] = running;
        running += g.group(gi).count;
    }
    std::vector<ClassRank> out(g.n());
    for (Label x = 1; x <= g.n(); ++x) {
        const Position p = g.decompose(x);
        out[x - 1] = {before[p.id.group] + p.id.index, p.rank};
    }
    return out;
}

inline std::vector<BitLabel> bit_labels_for_layout(const GroupSequence& g) {
    const BitLabelCodec codec(g.n());
    std::vector<BitLabel> out;
    out.reserve(g.n());
    for (const auto& cr : class_ranks_for_layout(g)) out.push_back(codec.encode(cr.cls, cr.rank));
    return out;
}

}  // namespace succeq
