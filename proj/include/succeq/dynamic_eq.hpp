#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "succeq/bits.hpp"
#include "succeq/error.hpp"
#include "succeq/isqrt.hpp"
#include "succeq/partition.hpp"
#include "succeq/radix_sort.hpp"
#include "succeq/static_eq.hpp"

namespace succeq {

/// Old-to-new label permutation produced by one rebuild. Pull pairs with
/// next(); map() answers single labels in O(lg k).
class RelabelEvent {
public:
    RelabelEvent(GroupSequence before, GroupSequence after, std::unordered_map<Label, Label> merged_base,
                 std::vector<std::vector<std::uint64_t>> merged_idx, std::vector<Label> survivor_base)
        : before_(std::move(before)),
          after_(std::move(after)),
          merged_base_(std::move(merged_base)),
          merged_idx_(std::move(merged_idx)),
          survivor_base_(std::move(survivor_base)) {
        reset();
    }

    /// Identity relabeling over g.
    static RelabelEvent identity(const GroupSequence& g) {
        std::vector<Label> base(g.k() + 1, 0);
        for (std::uint64_t j = 1; j <= g.k(); ++j) base[j] = g.prefix(j - 1) + 1;
        return RelabelEvent(g, g, {}, std::vector<std::vector<std::uint64_t>>(g.k() + 1), std::move(base));
    }

    std::uint64_t size() const noexcept { return before_.n(); }
    const GroupSequence& before() const noexcept { return before_; }
    const GroupSequence& after() const noexcept { return after_; }

    Label map(Label old) const {
        detail::check_label(old, size());
        const Position pos = before_.decompose(old);
        return class_base(pos.id) + pos.rank - 1;
    }

    std::optional<std::pair<Label, Label>> next() {
        if (x_ > size()) return std::nullopt;
        if (rank_ == class_size_) {
            if (rank_ != 0 && ++idx_ > before_.group(g_).count) {
                ++g_;
                idx_ = 1;
            }
            class_size_ = before_.group(g_).size;
            base_ = class_base({g_, idx_});
            rank_ = 0;
        }
        const std::pair<Label, Label> out{x_, base_ + rank_};
        ++x_;
        ++rank_;
        return out;
    }

    void reset() {
        x_ = 1;
        g_ = 1;
        idx_ = 1;
        rank_ = 0;
        class_size_ = 0;
        base_ = 0;
    }

    /// New label of every old label, indexed by old label - 1.
    std::vector<Label> to_vector() const {
        RelabelEvent copy = *this;
        copy.reset();
        std::vector<Label> out;
        out.reserve(size());
        while (auto p = copy.next()) out.push_back(p->second);
        return out;
    }

private:
    Label class_base(ClassId id) const {
        const Label first = before_.first_label(id);
        if (auto it = merged_base_.find(first); it != merged_base_.end()) return it->second;
        const auto& gone = merged_idx_[id.group];
        const std::uint64_t earlier = std::lower_bound(gone.begin(), gone.end(), id.index) - gone.begin();
        return survivor_base_[id.group] + (id.index - earlier - 1) * before_.group(id.group).size;
    }

    GroupSequence before_;
    GroupSequence after_;
    std::unordered_map<Label, Label> merged_base_;     // old class minimum -> new label of that minimum
    std::vector<std::vector<std::uint64_t>> merged_idx_;  // per old group, sorted merged class indices
    std::vector<Label> survivor_base_;                  // per old group, new label of its first survivor

    Label x_ = 1;
    std::uint64_t g_ = 1, idx_ = 1, rank_ = 0, class_size_ = 0;
    Label base_ = 0;
};

struct MergeReport {
    bool merged = false;
    bool rebuilt = false;
    std::optional<RelabelEvent> relabel;
};

/// One forest node as seen from outside: parent_rep == 0 marks a root.
struct ForestEntry {
    Label rep = 0;
    Label parent_rep = 0;
    std::uint32_t rank = 0;
    friend bool operator==(const ForestEntry&, const ForestEntry&) = default;
};

/// Merges over a static ConstEq. Classes that took part in a merge are keyed
/// by their smallest label in M and linked into a union-by-rank forest. After
/// ceil(sqrt n) effective merges the static structure is rebuilt over the
/// merged partition and every label changes.
class DynEq {
public:
    explicit DynEq(const GroupSequence& g) : DynEq(g, std::make_shared<const SqrtTables>(SqrtTables::build(g.n()))) {}

    DynEq(const GroupSequence& g, std::shared_ptr<const SqrtTables> sqrt)
        : base_(g, std::move(sqrt)), threshold_(ceil_sqrt_reference(g.n())) {}

    /// Restores a structure from its static part and forest, in arena order.
    static DynEq from_parts(ConstEq base, std::span<const ForestEntry> forest, std::uint64_t rebuilds) {
        DynEq d(std::move(base));
        d.rebuilds_ = rebuilds;
        for (const auto& e : forest) {
            if (e.rep < 1 || e.rep > d.n() || d.base_.representative(e.rep) != e.rep)
                throw ParseError("forest key is not a class representative");
            if (d.index_.contains(e.rep)) throw ParseError("duplicate forest key");
            d.index_.emplace(e.rep, static_cast<std::uint32_t>(d.nodes_.size()));
            d.nodes_.push_back({e.rep, kNil, e.rank, 0});
        }
        for (std::size_t i = 0; i < forest.size(); ++i) {
            if (forest[i].parent_rep == 0) continue;
            const auto it = d.index_.find(forest[i].parent_rep);
            if (it == d.index_.end() || it->second == i) throw ParseError("forest parent missing");
            d.nodes_[i].parent = it->second;
            ++d.nodes_[it->second].children;
            ++d.counter_;
        }
        for (std::size_t i = 0; i < d.nodes_.size(); ++i) {
            std::uint32_t s = static_cast<std::uint32_t>(i);
            for (std::size_t steps = 0; d.nodes_[s].parent != kNil; ++steps) {
                if (steps > d.nodes_.size()) throw ParseError("forest contains a cycle");
                s = d.nodes_[s].parent;
            }
        }
        if (d.counter_ >= d.threshold_) throw ParseError("merge counter at or above the rebuild threshold");
        return d;
    }

    std::uint64_t n() const noexcept { return base_.n(); }
    std::uint64_t threshold() const noexcept { return threshold_; }
    std::uint64_t merge_count() const noexcept { return counter_; }
    std::uint64_t rebuilds() const noexcept { return rebuilds_; }
    std::size_t dictionary_size() const noexcept { return nodes_.size(); }
    const ConstEq& base() const noexcept { return base_; }

    /// Representative of x's current set. Compresses paths.
    Label find(Label x) {
        const Label rep = base_.representative(x);
        const auto it = index_.find(rep);
        if (it == index_.end()) return rep;
        return nodes_[root_of(it->second)].rep;
    }

    bool same(Label x, Label y) {
        if (base_.same_class(x, y)) return true;
        const auto ix = index_.find(base_.representative(x));
        if (ix == index_.end()) return false;
        const auto iy = index_.find(base_.representative(y));
        if (iy == index_.end()) return false;
        return root_of(ix->second) == root_of(iy->second);
    }

    MergeReport unite(Label x, Label y) {
        const Label rx = base_.representative(x);
        const Label ry = base_.representative(y);
        if (rx == ry) return {};
        const std::uint32_t sx = slot_for(rx);
        const std::uint32_t sy = slot_for(ry);
        std::uint32_t a = root_of(sx), b = root_of(sy);
        if (a == b) return {};
        if (nodes_[a].rank > nodes_[b].rank) std::swap(a, b);
        if (nodes_[a].rank == nodes_[b].rank) ++nodes_[b].rank;
        nodes_[a].parent = b;
        ++nodes_[b].children;
        ++counter_;
        MergeReport report{true, false, std::nullopt};
        if (counter_ >= threshold_) {
            report.relabel = rebuild();
            report.rebuilt = true;
        }
        return report;
    }

    /// Rebuilds the static structure over the merged partition and clears the
    /// forest. Work is O(k + |M| + sqrt n) besides the ConstEq construction.
    RelabelEvent rebuild() {
        const GroupSequence old = base_.groups();
        ++rebuilds_;
        if (nodes_.empty()) return RelabelEvent::identity(old);

        const std::size_t m = nodes_.size();
        std::vector<std::uint32_t> root(m, kNil);
        std::vector<std::uint64_t> class_size(m), offset(m), set_size(m, 0);
        std::vector<std::uint64_t> remaining(old.k() + 1);
        for (std::uint64_t j = 1; j <= old.k(); ++j) remaining[j] = old.group(j).count;
        std::vector<std::vector<std::uint64_t>> merged_idx(old.k() + 1);

        // Each leaf-to-root path is walked until it meets a visited node, so
        // every node is accounted once.
        std::vector<std::uint32_t> path;
        for (std::uint32_t leaf = 0; leaf < m; ++leaf) {
            if (nodes_[leaf].children != 0 || root[leaf] != kNil) continue;
            path.clear();
            std::uint32_t s = leaf;
            while (root[s] == kNil && nodes_[s].parent != kNil) {
                path.push_back(s);
                s = nodes_[s].parent;
            }
            if (root[s] == kNil) {
                path.push_back(s);
                root[s] = s;
            }
            const std::uint32_t r = root[s];
            for (std::uint32_t v : path) {
                root[v] = r;
                const GroupLocation loc = base_.find(nodes_[v].rep);
                class_size[v] = loc.size;
                --remaining[loc.group];
                merged_idx[loc.group].push_back(loc.index);
            }
        }
        for (std::uint32_t v = 0; v < m; ++v) {
            offset[v] = set_size[root[v]];
            set_size[root[v]] += class_size[v];
        }
        for (auto& idx : merged_idx) std::sort(idx.begin(), idx.end());

        struct Part {
            std::uint64_t size;
            std::uint64_t count;
            std::uint64_t old_group;  // 0 for a merged set
            std::uint32_t root;
        };
        std::vector<Part> parts;
        for (std::uint64_t j = 1; j <= old.k(); ++j)
            if (remaining[j] > 0) parts.push_back({old.group(j).size, remaining[j], j, kNil});
        for (std::uint32_t v = 0; v < m; ++v)
            if (root[v] == v) parts.push_back({set_size[v], 1, 0, v});
        radix_sort(parts, [](const Part& p) { return p.size; }, n());

        struct Merged {
            std::uint64_t size;
            std::uint64_t count;
            std::size_t first, last;  // range in parts
        };
        std::vector<Merged> groups;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (!groups.empty() && groups.back().size == parts[i].size) {
                groups.back().count += parts[i].count;
                groups.back().last = i + 1;
            } else {
                groups.push_back({parts[i].size, parts[i].count, i, i + 1});
            }
        }
        radix_sort(groups, [](const Merged& g) { return g.size * g.count; }, n());

        std::vector<Group> fresh;
        fresh.reserve(groups.size());
        std::vector<Label> survivor_base(old.k() + 1, 0), root_base(m, 0);
        Label cursor = 1;
        for (const auto& g : groups) {
            fresh.push_back({g.size, g.count});
            for (std::size_t i = g.first; i < g.last; ++i) {
                if (parts[i].old_group != 0)
                    survivor_base[parts[i].old_group] = cursor;
                else
                    root_base[parts[i].root] = cursor;
                cursor += parts[i].size * parts[i].count;
            }
        }
        std::unordered_map<Label, Label> merged_base;
        merged_base.reserve(m);
        for (std::uint32_t v = 0; v < m; ++v) merged_base.emplace(nodes_[v].rep, root_base[root[v]] + offset[v]);

        GroupSequence next(std::move(fresh));
        base_ = ConstEq(next, base_.sqrt_tables());
        nodes_.clear();
        index_.clear();
        counter_ = 0;
        return RelabelEvent(old, std::move(next), std::move(merged_base), std::move(merged_idx), std::move(survivor_base));
    }

    /// Forest in arena order.
    std::vector<ForestEntry> forest() const {
        std::vector<ForestEntry> out;
        out.reserve(nodes_.size());
        for (const auto& node : nodes_)
            out.push_back({node.rep, node.parent == kNil ? 0 : nodes_[node.parent].rep, node.rank});
        return out;
    }

    /// Static fields plus M (hash slots of key and arena index) and the forest
    /// (parent, rank, child count per node).
    SpaceReport space() const {
        SpaceReport report = base_.space();
        const unsigned slot_bits = bit_width(2 * threshold_);
        const unsigned rank_bits = bit_width(bit_width(n()));
        report.push_back({"merge_dictionary", index_.bucket_count() * (bit_width(n()) + slot_bits)});
        report.push_back({"merge_forest", nodes_.size() * (2 * slot_bits + rank_bits)});
        report.push_back({"merge_counters", 3 * 64});
        return report;
    }

    std::uint64_t space_bits() const { return total_bits(space()); }

private:
    static constexpr std::uint32_t kNil = std::numeric_limits<std::uint32_t>::max();

    struct Node {
        Label rep;
        std::uint32_t parent;
        std::uint32_t rank;
        std::uint32_t children;  // zero iff leaf
    };

    explicit DynEq(ConstEq base) : base_(std::move(base)), threshold_(ceil_sqrt_reference(base_.n())) {}

    std::uint32_t slot_for(Label rep) {
        auto [it, fresh] = index_.try_emplace(rep, static_cast<std::uint32_t>(nodes_.size()));
        if (fresh) nodes_.push_back({rep, kNil, 0, 0});
        return it->second;
    }

    std::uint32_t root_of(std::uint32_t s) {
        std::uint32_t r = s;
        while (nodes_[r].parent != kNil) r = nodes_[r].parent;
        while (nodes_[s].parent != kNil && nodes_[s].parent != r) {
            const std::uint32_t up = nodes_[s].parent;
            --nodes_[up].children;
            ++nodes_[r].children;
            nodes_[s].parent = r;
            s = up;
        }
        return r;
    }

    ConstEq base_;
    std::uint64_t threshold_ = 1;
    std::uint64_t counter_ = 0;
    std::uint64_t rebuilds_ = 0;
    std::unordered_map<Label, std::uint32_t> index_;
    std::vector<Node> nodes_;
};

inline DynEq build_dynamic(const GroupSequence& g) { return DynEq(g); }

}  // namespace succeq
