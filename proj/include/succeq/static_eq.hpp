#pragma once

#include <concepts>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "succeq/bits.hpp"
#include "succeq/bitvector.hpp"
#include "succeq/error.hpp"
#include "succeq/isqrt.hpp"
#include "succeq/partition.hpp"
#include "succeq/predecessor.hpp"
#include "succeq/probe.hpp"

namespace succeq {

/// Where a label lives: its group, class within the group, and class size.
struct GroupLocation {
    std::uint64_t group = 0;
    std::uint64_t index = 0;
    std::uint64_t size = 0;

    ClassId id() const noexcept { return {group, index}; }
    friend bool operator==(const GroupLocation&, const GroupLocation&) = default;
};

struct FieldBits {
    std::string name;
    std::uint64_t bits = 0;
};

using SpaceReport = std::vector<FieldBits>;

inline std::uint64_t total_bits(const SpaceReport& report) {
    std::uint64_t total = 0;
    for (const auto& f : report) total += f.bits;
    return total;
}

template <class S>
concept EquivalenceIndex = requires(const S& s, Label x) {
    { s.n() } -> std::convertible_to<std::uint64_t>;
    { s.k() } -> std::convertible_to<std::uint64_t>;
    { s.find(x) } -> std::same_as<GroupLocation>;
    { s.same_class(x, x) } -> std::same_as<bool>;
    { s.space() } -> std::same_as<SpaceReport>;
    { s.space_bits() } -> std::convertible_to<std::uint64_t>;
    { s.groups() } -> std::same_as<GroupSequence>;
};

/// Values in minimal binary (max(1, bit_width(v)) bits each), concatenated,
/// with a shadow bit vector marking where each value starts.
class ShadowedSequence {
public:
    ShadowedSequence() = default;

    explicit ShadowedSequence(std::span<const std::uint64_t> values) {
        BitWriter stream;
        std::vector<bool> starts;
        for (auto v : values) {
            const unsigned w = v == 0 ? 1 : bit_width(v);
            starts.push_back(true);
            starts.insert(starts.end(), w - 1, false);
            stream.append(v, w);
        }
        length_ = stream.size();
        stream_ = std::move(stream).release();
        starts_ = BitVector(starts);
    }

    static ShadowedSequence from_parts(std::vector<std::uint64_t> stream, BitVector starts) {
        if (stream.size() != (starts.size() + 63) / 64) throw ParseError("shadow length differs from stream length");
        if (starts.size() > 0 && !starts.get(1)) throw ParseError("shadow sequence must start with a one");
        ShadowedSequence s;
        s.length_ = starts.size();
        s.stream_ = std::move(stream);
        s.starts_ = std::move(starts);
        return s;
    }

    std::size_t size() const noexcept { return starts_.ones(); }

    /// 1-based.
    std::uint64_t value(std::size_t j) const {
        const std::uint64_t start = *starts_.select1(j);
        const std::uint64_t end = j < size() ? *starts_.next_one(start) : length_ + 1;
        probe::tick();
        return read_bits(stream_, start - 1, static_cast<unsigned>(end - start));
    }

    /// Sequential reader positioned before value j (1-based).
    class Reader {
    public:
        Reader(const ShadowedSequence& seq, std::size_t j) : seq_(&seq), next_(j) {
            start_ = j <= seq.size() ? *seq.starts_.select1(j) : seq.length_ + 1;
        }

        std::uint64_t next() {
            const std::uint64_t end = next_ < seq_->size() ? *seq_->starts_.next_one(start_) : seq_->length_ + 1;
            probe::tick();
            const std::uint64_t v = read_bits(seq_->stream_, start_ - 1, static_cast<unsigned>(end - start_));
            start_ = end;
            ++next_;
            return v;
        }

    private:
        const ShadowedSequence* seq_;
        std::size_t next_;
        std::uint64_t start_;
    };

    std::vector<std::uint64_t> decode_all() const {
        std::vector<std::uint64_t> out;
        out.reserve(size());
        Reader r(*this, 1);
        for (std::size_t j = 1; j <= size(); ++j) out.push_back(r.next());
        return out;
    }

    std::uint64_t stream_bits() const noexcept { return length_; }
    const std::vector<std::uint64_t>& stream_words() const noexcept { return stream_; }
    const BitVector& starts() const noexcept { return starts_; }

private:
    std::vector<std::uint64_t> stream_;
    std::uint64_t length_ = 0;
    BitVector starts_;
};

namespace detail {

inline void check_label(Label x, std::uint64_t n) {
    if (x < 1 || x > n) throw InvalidInput("label " + std::to_string(x) + " out of range [1, " + std::to_string(n) + "]");
}

/// Class index within a group from the offset past the group's start.
inline GroupLocation locate_in_group(std::uint64_t group, std::uint64_t offset, std::uint64_t gamma, std::uint64_t count) {
    const std::uint64_t s = gamma / count;
    return {group, (offset - 1) / s + 1, s};
}

/// Rebuilds groups from (gamma, count) pairs, rejecting anything inconsistent.
inline GroupSequence groups_from_gammas(std::span<const std::uint64_t> gammas, std::span<const std::uint64_t> counts) {
    if (gammas.size() != counts.size()) throw ParseError("gamma and count sequences differ in length");
    std::vector<Group> groups;
    groups.reserve(gammas.size());
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        if (counts[i] == 0 || gammas[i] % counts[i] != 0) throw ParseError("gamma not a multiple of the class count");
        groups.push_back({gammas[i] / counts[i], counts[i]});
    }
    try {
        return GroupSequence(std::move(groups));
    } catch (const InvalidInput& e) {
        throw ParseError(std::string("inconsistent group data: ") + e.what());
    }
}

/// Group containing x, located by scanning deltas forward from group `from`,
/// whose prefix sum and gamma are known. `steps_left` bounds the scan.
struct ScanResult {
    std::uint64_t group;
    std::uint64_t before;  // P_{group-1}
    std::uint64_t gamma;
};

inline ScanResult scan_deltas(const ShadowedSequence& deltas, std::uint64_t from, std::uint64_t prefix, std::uint64_t gamma,
                              Label x) {
    ShadowedSequence::Reader reader(deltas, from + 1);
    for (std::uint64_t j = from + 1;; ++j) {
        const std::uint64_t g = gamma + reader.next();
        if (prefix + g >= x) return {j, prefix, g};
        prefix += g;
        gamma = g;
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// O(sqrt n) bits, O(lg n) query: delta and count streams with shadow select
/// structures, plus absolute prefix sums (and gammas) every ceil(lg n) groups.
class CompactEq {
public:
    CompactEq() = default;

    explicit CompactEq(const GroupSequence& g) : n_(g.n()), k_(g.k()), period_(std::max(1u, ceil_lg(g.n()))) {
        deltas_ = ShadowedSequence(g.deltas());
        std::vector<std::uint64_t> counts;
        for (const auto& grp : g.groups()) counts.push_back(grp.count);
        counts_ = ShadowedSequence(counts);
        std::vector<std::uint64_t> sp, sg;
        for (std::uint64_t j = period_; j <= k_; j += period_) {
            sp.push_back(g.prefix(j));
            sg.push_back(g.group(j).gamma());
        }
        sample_prefix_ = PackedArray::with_width(sp, bit_width(n_));
        sample_gamma_ = PackedArray::with_width(sg, bit_width(n_));
    }

    static CompactEq from_parts(std::uint64_t n, ShadowedSequence deltas, ShadowedSequence counts) {
        std::vector<std::uint64_t> gammas = deltas.decode_all();
        for (std::size_t i = 1; i < gammas.size(); ++i) gammas[i] += gammas[i - 1];
        const GroupSequence g = detail::groups_from_gammas(gammas, counts.decode_all());
        if (g.n() != n) throw ParseError("decoded partition size differs from header");
        return CompactEq(g);
    }

    std::uint64_t n() const noexcept { return n_; }
    std::uint64_t k() const noexcept { return k_; }
    std::uint64_t sample_period() const noexcept { return period_; }

    /// p(x) + 1, the prefix sum before it, and gamma of that group.
    detail::ScanResult locate_group(Label x) const {
        detail::check_label(x, n_);
        std::size_t lo = 0, hi = sample_prefix_.size();
        while (lo < hi) {
            const std::size_t mid = lo + (hi - lo + 1) / 2;
            if (sample_prefix_[mid - 1] < x)
                lo = mid;
            else
                hi = mid - 1;
        }
        const std::uint64_t prefix = lo ? sample_prefix_[lo - 1] : 0;
        const std::uint64_t gamma = lo ? sample_gamma_[lo - 1] : 0;
        return detail::scan_deltas(deltas_, lo * period_, prefix, gamma, x);
    }

    GroupLocation find(Label x) const {
        const auto r = locate_group(x);
        return detail::locate_in_group(r.group, x - r.before, r.gamma, counts_.value(r.group));
    }

    bool same_class(Label x, Label y) const {
        const auto rx = locate_group(x);
        const auto ry = locate_group(y);
        if (rx.group != ry.group) return false;
        const std::uint64_t s = rx.gamma / counts_.value(rx.group);
        return (x - rx.before - 1) / s == (y - ry.before - 1) / s;
    }

    GroupSequence groups() const {
        std::vector<std::uint64_t> gammas = deltas_.decode_all();
        for (std::size_t i = 1; i < gammas.size(); ++i) gammas[i] += gammas[i - 1];
        return detail::groups_from_gammas(gammas, counts_.decode_all());
    }

    SpaceReport space() const {
        return {{"delta_stream", deltas_.stream_bits()},
                {"delta_shadow", deltas_.starts().space_bits()},
                {"count_stream", counts_.stream_bits()},
                {"count_shadow", counts_.starts().space_bits()},
                {"sampled_prefix_sums", sample_prefix_.space_bits()},
                {"sampled_gammas", sample_gamma_.space_bits()},
                {"scalars", 3 * 64}};
    }

    std::uint64_t space_bits() const { return total_bits(space()); }

    const ShadowedSequence& deltas() const noexcept { return deltas_; }
    const ShadowedSequence& counts() const noexcept { return counts_; }

private:
    std::uint64_t n_ = 0;
    std::uint64_t k_ = 0;
    std::uint64_t period_ = 1;
    ShadowedSequence deltas_;
    ShadowedSequence counts_;
    PackedArray sample_prefix_;
    PackedArray sample_gamma_;
};

// ---------------------------------------------------------------------------

/// O(sqrt n lg n / lg lg n) bits, O(lg lg n) query: every t-th prefix sum
/// (t = ceil(lg lg n)) in a predecessor dictionary, deltas in between, and a
/// plain array of class counts.
class FastEq {
public:
    FastEq() = default;

    explicit FastEq(const GroupSequence& g)
        : n_(g.n()), k_(g.k()), period_(std::max(1u, ceil_lg(ceil_lg(g.n())))) {
        deltas_ = ShadowedSequence(g.deltas());
        std::vector<std::uint64_t> counts, keys, sg;
        for (const auto& grp : g.groups()) counts.push_back(grp.count);
        counts_ = PackedArray::with_width(counts, bit_width(n_));
        for (std::uint64_t j = period_; j <= k_; j += period_) {
            keys.push_back(g.prefix(j));
            sg.push_back(g.group(j).gamma());
        }
        samples_ = PredecessorDict(keys, n_);
        sample_gamma_ = PackedArray::with_width(sg, bit_width(n_));
    }

    static FastEq from_parts(std::uint64_t n, ShadowedSequence deltas, const PackedArray& counts) {
        std::vector<std::uint64_t> gammas = deltas.decode_all();
        for (std::size_t i = 1; i < gammas.size(); ++i) gammas[i] += gammas[i - 1];
        const GroupSequence g = detail::groups_from_gammas(gammas, counts.to_vector());
        if (g.n() != n) throw ParseError("decoded partition size differs from header");
        return FastEq(g);
    }

    std::uint64_t n() const noexcept { return n_; }
    std::uint64_t k() const noexcept { return k_; }
    std::uint64_t sample_period() const noexcept { return period_; }

    detail::ScanResult locate_group(Label x) const {
        detail::check_label(x, n_);
        std::uint64_t from = 0, prefix = 0, gamma = 0;
        if (x > 1) {
            if (const auto hit = samples_.predecessor(x - 1)) {
                from = hit->index * period_;
                prefix = hit->key;
                gamma = sample_gamma_[hit->index - 1];
            }
        }
        return detail::scan_deltas(deltas_, from, prefix, gamma, x);
    }

    GroupLocation find(Label x) const {
        const auto r = locate_group(x);
        return detail::locate_in_group(r.group, x - r.before, r.gamma, counts_[r.group - 1]);
    }

    bool same_class(Label x, Label y) const {
        const auto rx = locate_group(x);
        const auto ry = locate_group(y);
        if (rx.group != ry.group) return false;
        const std::uint64_t s = rx.gamma / counts_[rx.group - 1];
        return (x - rx.before - 1) / s == (y - ry.before - 1) / s;
    }

    GroupSequence groups() const {
        std::vector<std::uint64_t> gammas = deltas_.decode_all();
        for (std::size_t i = 1; i < gammas.size(); ++i) gammas[i] += gammas[i - 1];
        return detail::groups_from_gammas(gammas, counts_.to_vector());
    }

    SpaceReport space() const {
        return {{"delta_stream", deltas_.stream_bits()},
                {"delta_shadow", deltas_.starts().space_bits()},
                {"counts", counts_.space_bits()},
                {"sample_dictionary", samples_.space_bits()},
                {"sampled_gammas", sample_gamma_.space_bits()},
                {"scalars", 3 * 64}};
    }

    std::uint64_t space_bits() const { return total_bits(space()); }

    const ShadowedSequence& deltas() const noexcept { return deltas_; }
    const PackedArray& counts() const noexcept { return counts_; }

private:
    std::uint64_t n_ = 0;
    std::uint64_t k_ = 0;
    std::uint64_t period_ = 1;
    ShadowedSequence deltas_;
    PackedArray counts_;
    PredecessorDict samples_;
    PackedArray sample_gamma_;
};

// ---------------------------------------------------------------------------

/// O(sqrt n lg n) bits, O(1) query: full prefix sums and counts, the pointer
/// array A[i] = max{ j : P_j <= i(i+1)/2 } for i = 1 .. ceil(sqrt(2n)), and
/// square-root tables. For i = ceil(sqrt(2x)) - 1 the group predecessor of x is
/// one of A[i] - 1, A[i], A[i] + 1.
class ConstEq {
public:
    ConstEq() = default;

    explicit ConstEq(const GroupSequence& g) : ConstEq(g, std::make_shared<const SqrtTables>(SqrtTables::build(g.n()))) {}

    /// Reuses square-root tables built for the same n.
    ConstEq(const GroupSequence& g, std::shared_ptr<const SqrtTables> sqrt) : n_(g.n()), k_(g.k()), sqrt_(std::move(sqrt)) {
        if (!sqrt_ || sqrt_->max_arg() != 2 * n_) throw InvalidInput("square-root tables built for a different n");
        std::vector<std::uint64_t> prefix(k_), counts(k_);
        for (std::size_t j = 1; j <= k_; ++j) {
            prefix[j - 1] = g.prefix(j);
            counts[j - 1] = g.group(j).count;
        }
        prefix_ = PackedArray::with_width(prefix, bit_width(n_));
        counts_ = PackedArray::with_width(counts, bit_width(n_));

        const std::uint64_t m = ceil_sqrt_reference(2 * n_);
        std::vector<std::uint64_t> a(m);
        std::uint64_t j = 0;
        for (std::uint64_t i = 1; i <= m; ++i) {
            const std::uint64_t threshold = i * (i + 1) / 2;
            while (j < k_ && prefix[j] <= threshold) ++j;
            a[i - 1] = j;
        }
        a_ = PackedArray::with_width(a, bit_width(k_));
        check_candidates_sample();
    }

    static ConstEq from_parts(std::uint64_t n, const PackedArray& prefix, const PackedArray& counts, const PackedArray& a,
                              std::shared_ptr<const SqrtTables> sqrt) {
        std::vector<std::uint64_t> p = prefix.to_vector(), gammas(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (i > 0 && p[i] < p[i - 1]) throw ParseError("prefix sums not increasing");
            gammas[i] = p[i] - (i ? p[i - 1] : 0);
        }
        const GroupSequence g = detail::groups_from_gammas(gammas, counts.to_vector());
        if (g.n() != n) throw ParseError("decoded partition size differs from header");
        ConstEq out(g, std::move(sqrt));
        if (!(out.a_ == a)) throw ParseError("pointer array inconsistent with prefix sums");
        return out;
    }

    std::uint64_t n() const noexcept { return n_; }
    std::uint64_t k() const noexcept { return k_; }

    std::uint64_t pointer_count() const noexcept { return a_.size(); }
    /// A[i], 1-based.
    std::uint64_t pointer(std::uint64_t i) const { return a_.raw(i - 1); }
    std::uint64_t pointer_index_for(Label x) const { return sqrt_->ceil_sqrt(2 * x) - 1; }

    /// p(x) = max{ j : P_j < x }.
    std::uint64_t predecessor(Label x) const {
        detail::check_label(x, n_);
        const std::uint64_t a = a_[pointer_index_for(x) - 1];
        const std::uint64_t top = std::min<std::uint64_t>(a + 1, k_ - 1);
        const std::uint64_t bottom = a > 0 ? a - 1 : 0;
        for (std::uint64_t c = top;; --c) {
            if (c == 0 || prefix_[c - 1] < x) return c;
            if (c == bottom) break;
        }
        throw std::logic_error("group predecessor outside the A[i] +/- 1 window");
    }

    GroupLocation find(Label x) const {
        const std::uint64_t p = predecessor(x);
        const std::uint64_t before = p ? prefix_[p - 1] : 0;
        const std::uint64_t gamma = prefix_[p] - before;
        return detail::locate_in_group(p + 1, x - before, gamma, counts_[p]);
    }

    bool same_class(Label x, Label y) const {
        const std::uint64_t px = predecessor(x);
        if (px != predecessor(y)) return false;
        const std::uint64_t before = px ? prefix_[px - 1] : 0;
        const std::uint64_t s = (prefix_[px] - before) / counts_[px];
        return (x - before - 1) / s == (y - before - 1) / s;
    }

    /// Smallest label of x's class.
    Label representative(Label x) const {
        const std::uint64_t p = predecessor(x);
        const std::uint64_t before = p ? prefix_[p - 1] : 0;
        const std::uint64_t s = (prefix_[p] - before) / counts_[p];
        return x - (x - before - 1) % s;
    }

    GroupSequence groups() const {
        std::vector<Group> groups(k_);
        for (std::size_t j = 0; j < k_; ++j) {
            const std::uint64_t gamma = prefix_.raw(j) - (j ? prefix_.raw(j - 1) : 0);
            groups[j] = {gamma / counts_.raw(j), counts_.raw(j)};
        }
        return GroupSequence(std::move(groups));
    }

    /// Size of group g (1-based), O(1).
    std::uint64_t group_size(std::uint64_t g) const {
        const std::uint64_t before = g > 1 ? prefix_[g - 2] : 0;
        return (prefix_[g - 1] - before) / counts_[g - 1];
    }

    SpaceReport space() const {
        return {{"prefix_sums", prefix_.space_bits()},
                {"counts", counts_.space_bits()},
                {"pointers", a_.space_bits()},
                {"sqrt_tables", sqrt_->space_bits()},
                {"scalars", 2 * 64}};
    }

    std::uint64_t space_bits() const { return total_bits(space()); }

    const PackedArray& prefix_sums() const noexcept { return prefix_; }
    const PackedArray& counts() const noexcept { return counts_; }
    const PackedArray& pointers() const noexcept { return a_; }
    const std::shared_ptr<const SqrtTables>& sqrt_tables() const noexcept { return sqrt_; }

private:
    /// Spot-checks the A[i] +/- 1 window at every group boundary and at up to
    /// 64 evenly spaced labels.
    void check_candidates_sample() const {
        auto check = [&](Label x) {
            if (x < 1 || x > n_) return;
            const std::uint64_t p = predecessor(x);
            if (prefix_.raw(p) < x) throw std::logic_error("group predecessor outside the A[i] +/- 1 window");
        };
        for (std::size_t j = 0; j < k_; ++j) {
            check(prefix_.raw(j));
            check(prefix_.raw(j) + 1);
        }
        const std::uint64_t stride = std::max<std::uint64_t>(1, n_ / 64);
        for (Label x = 1; x <= n_; x += stride) check(x);
    }

    std::uint64_t n_ = 0;
    std::uint64_t k_ = 0;
    PackedArray prefix_;
    PackedArray counts_;
    PackedArray a_;
    std::shared_ptr<const SqrtTables> sqrt_;
};

static_assert(EquivalenceIndex<CompactEq>);
static_assert(EquivalenceIndex<FastEq>);
static_assert(EquivalenceIndex<ConstEq>);

inline CompactEq build_compact(const GroupSequence& g) { return CompactEq(g); }
inline FastEq build_fast(const GroupSequence& g) { return FastEq(g); }
inline ConstEq build_const(const GroupSequence& g) { return ConstEq(g); }

}  // namespace succeq
