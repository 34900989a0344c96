#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <span>
#include <unordered_set>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "succeq/bits.hpp"
#include "succeq/error.hpp"

namespace succeq {

/// Multiset of class sizes. Order carries no meaning.
struct ClassSizes {
    std::vector<std::uint64_t> sizes;

    std::uint64_t total() const noexcept {
        std::uint64_t n = 0;
        for (auto s : sizes) n += s;
        return n;
    }
    std::size_t classes() const noexcept { return sizes.size(); }
};

/// One run of equally-sized classes: `count` classes of `size` elements each.
struct Group {
    std::uint64_t size = 0;
    std::uint64_t count = 0;

    std::uint64_t gamma() const noexcept { return size * count; }
    friend bool operator==(const Group&, const Group&) = default;
};

/// Canonical identity of a class: 1-based group and 1-based index within it.
struct ClassId {
    std::uint64_t group = 0;
    std::uint64_t index = 0;
    friend auto operator<=>(const ClassId&, const ClassId&) = default;
};

/// Position of a label in the implicit layout.
struct Position {
    ClassId id;
    std::uint64_t rank = 0;
    friend bool operator==(const Position&, const Position&) = default;
};

/// ceil(sqrt(v)) from a floating estimate corrected by exact integer comparison.
inline std::uint64_t ceil_sqrt_reference(std::uint64_t v) noexcept {
    if (v == 0) return 0;
    std::uint64_t x = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(v)));
    while (x * x > v) --x;
    while ((x + 1) * (x + 1) <= v) ++x;
    return x * x == v ? x : x + 1;
}

/// Groups of equal-size classes ordered by nondecreasing gamma = size * count,
/// ties broken by ascending size. Labels 1..n are laid out group by group and
/// class by class, so class t of group g occupies
/// [P(g-1) + (t-1) * s_g + 1, P(g-1) + t * s_g].
class GroupSequence {
public:
    GroupSequence() = default;

    /// Validates canonical order and every structural invariant.
    explicit GroupSequence(std::vector<Group> groups) : groups_(std::move(groups)) {
        if (groups_.empty()) throw InvalidInput("partition has no classes");
        prefix_.assign(groups_.size() + 1, 0);
        std::unordered_set<std::uint64_t> seen;
        seen.reserve(groups_.size() * 2);
        for (std::size_t i = 0; i < groups_.size(); ++i) {
            const Group& g = groups_[i];
            if (g.size == 0 || g.count == 0) throw InvalidInput("group with zero size or count");
            if (!seen.insert(g.size).second) throw InvalidInput("duplicate class size across groups");
            if (i > 0) {
                const Group& prev = groups_[i - 1];
                if (prev.gamma() > g.gamma() || (prev.gamma() == g.gamma() && prev.size > g.size))
                    throw InvalidInput("groups not in canonical (gamma, size) order");
            }
            if (g.gamma() < i + 1) throw InvalidInput("gamma_i < i");
            prefix_[i + 1] = prefix_[i] + g.gamma();
            classes_ += g.count;
        }
        n_ = prefix_.back();
        if (groups_.size() > ceil_sqrt_reference(2 * n_)) throw InvalidInput("more groups than ceil(sqrt(2n))");
    }

    std::uint64_t n() const noexcept { return n_; }
    std::uint64_t classes() const noexcept { return classes_; }
    std::size_t k() const noexcept { return groups_.size(); }

    /// 1-based group access.
    const Group& group(std::size_t g) const { return groups_.at(g - 1); }
    const std::vector<Group>& groups() const noexcept { return groups_; }

    /// P_i for i in [0, k]; P_0 = 0, P_k = n.
    std::uint64_t prefix(std::size_t i) const { return prefix_.at(i); }
    std::span<const std::uint64_t> prefix_sums() const noexcept { return prefix_; }

    /// delta_i = gamma_i - gamma_{i-1} with gamma_0 = 0, i in [1, k].
    std::uint64_t delta(std::size_t i) const {
        return group(i).gamma() - (i > 1 ? group(i - 1).gamma() : 0);
    }

    std::vector<std::uint64_t> deltas() const {
        std::vector<std::uint64_t> d(k());
        for (std::size_t i = 1; i <= k(); ++i) d[i - 1] = delta(i);
        return d;
    }

    /// Smallest label of a class.
    Label first_label(ClassId id) const { return label_of(id, 1); }

    Label label_of(ClassId id, std::uint64_t rank) const {
        if (id.group < 1 || id.group > k()) throw InvalidInput("group out of range");
        const Group& g = groups_[id.group - 1];
        if (id.index < 1 || id.index > g.count) throw InvalidInput("class index out of range");
        if (rank < 1 || rank > g.size) throw InvalidInput("rank out of range");
        return prefix_[id.group - 1] + (id.index - 1) * g.size + rank;
    }

    Position decompose(Label x) const {
        if (x < 1 || x > n_) throw InvalidInput("label out of range");
        // First prefix sum >= x identifies the group.
        const auto it = std::lower_bound(prefix_.begin() + 1, prefix_.end(), x);
        const std::size_t g = static_cast<std::size_t>(it - prefix_.begin());
        const std::uint64_t off = x - prefix_[g - 1];
        const std::uint64_t s = groups_[g - 1].size;
        return {{g, (off - 1) / s + 1}, (off - 1) % s + 1};
    }

    ClassSizes class_sizes() const {
        ClassSizes out;
        out.sizes.reserve(classes_);
        for (const auto& g : groups_) out.sizes.insert(out.sizes.end(), g.count, g.size);
        return out;
    }

    friend bool operator==(const GroupSequence& a, const GroupSequence& b) { return a.groups_ == b.groups_; }

private:
    std::vector<Group> groups_;
    std::vector<std::uint64_t> prefix_;
    std::uint64_t n_ = 0;
    std::uint64_t classes_ = 0;
};

/// Groups class sizes and orders them canonically.
inline GroupSequence normalize(const ClassSizes& input) {
    if (input.sizes.empty()) throw InvalidInput("empty class-size list");
    std::vector<std::uint64_t> sorted = input.sizes;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == 0) throw InvalidInput("class size must be positive");
    std::vector<Group> groups;
    for (auto s : sorted) {
        if (!groups.empty() && groups.back().size == s)
            ++groups.back().count;
        else
            groups.push_back({s, 1});
    }
    std::stable_sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
        return a.gamma() != b.gamma() ? a.gamma() < b.gamma() : a.size < b.size;
    });
    return GroupSequence(std::move(groups));
}

/// Explicit label -> class table; the ground truth for tests.
class NaiveOracle {
public:
    explicit NaiveOracle(const GroupSequence& g) : class_of_(g.n() + 1) {
        for (std::uint64_t gi = 1; gi <= g.k(); ++gi)
            for (std::uint64_t t = 1; t <= g.group(gi).count; ++t)
                for (std::uint64_t r = 1; r <= g.group(gi).size; ++r) class_of_[g.label_of({gi, t}, r)] = {gi, t};
    }

    std::uint64_t n() const noexcept { return class_of_.size() - 1; }

    ClassId class_of(Label x) const {
        if (x < 1 || x > n()) throw InvalidInput("label out of range");
        return class_of_[x];
    }

    bool same_class(Label x, Label y) const { return class_of(x) == class_of(y); }

private:
    std::vector<ClassId> class_of_;
};

using BigInt = boost::multiprecision::cpp_int;

/// p(0..n) by Euler's pentagonal-number recurrence.
inline std::vector<BigInt> partition_counts(std::uint64_t n) {
    std::vector<BigInt> p(n + 1);
    p[0] = 1;
    for (std::uint64_t m = 1; m <= n; ++m) {
        BigInt acc = 0;
        for (std::uint64_t j = 1;; ++j) {
            const std::uint64_t g1 = j * (3 * j - 1) / 2;
            if (g1 > m) break;
            const std::uint64_t g2 = j * (3 * j + 1) / 2;
            const bool plus = (j % 2) == 1;
            BigInt term = p[m - g1];
            if (g2 <= m) term += p[m - g2];
            if (plus)
                acc += term;
            else
                acc -= term;
        }
        p[m] = acc;
    }
    return p;
}

inline BigInt partition_count(std::uint64_t n) { return partition_counts(n).back(); }

/// ceil(lg p(n)): bits needed to name one partition of n.
inline std::uint64_t info_lower_bound_bits(std::uint64_t n) {
    if (n < 1) throw InvalidInput("n must be positive");
    const BigInt p = partition_count(n);
    if (p <= 1) return 0;
    return boost::multiprecision::msb(BigInt(p - 1)) + 1;
}

/// sum_{i=1}^{n} floor(n / i), summed over runs of equal quotient.
inline std::uint64_t label_space_size(std::uint64_t n) {
    if (n < 1) throw InvalidInput("n must be positive");
    std::uint64_t total = 0;
    for (std::uint64_t i = 1; i <= n;) {
        const std::uint64_t q = n / i;
        const std::uint64_t last = n / q;
        total += q * (last - i + 1);
        i = last + 1;
    }
    return total;
}

}  // namespace succeq
