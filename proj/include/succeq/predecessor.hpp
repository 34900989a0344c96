#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "succeq/bits.hpp"
#include "succeq/error.hpp"
#include "succeq/probe.hpp"

namespace succeq {

struct PredecessorHit {
    std::uint64_t key = 0;
    std::uint64_t index = 0;  // 1-based rank among the keys
    friend bool operator==(const PredecessorHit&, const PredecessorHit&) = default;
};

/// Static predecessor dictionary over keys in [1, U], laid out like a y-fast
/// trie: keys are cut into buckets of ~lg U consecutive keys, the first key of
/// each bucket is indexed by an x-fast trie (one hash table per prefix length),
/// and a query binary-searches prefix lengths, then one bucket.
class PredecessorDict {
public:
    PredecessorDict() = default;

    PredecessorDict(std::span<const std::uint64_t> keys, std::uint64_t universe) : universe_(universe) {
        if (universe < 1) throw InvalidInput("universe must be positive");
        for (std::size_t i = 0; i < keys.size(); ++i) {
            if (keys[i] < 1 || keys[i] > universe) throw InvalidInput("key outside universe");
            if (i > 0 && keys[i] <= keys[i - 1]) throw InvalidInput("keys not strictly increasing");
        }
        bits_ = bit_width(universe);
        bucket_ = bits_ > 0 ? bits_ : 1;
        keys_ = PackedArray::with_width(keys, bits_);
        const std::size_t reps = (keys.size() + bucket_ - 1) / bucket_;
        levels_.assign(bits_ + 1, {});
        for (std::size_t r = 0; r < reps; ++r) {
            const std::uint64_t key = keys[r * bucket_];
            for (unsigned len = 0; len <= bits_; ++len) {
                const std::uint64_t prefix = len == 0 ? 0 : key >> (bits_ - len);
                auto [it, fresh] = levels_[len].try_emplace(prefix, Node{r, r});
                if (!fresh) it->second.max_rep = r;
            }
        }
        reps_ = reps;
    }

    std::uint64_t universe() const noexcept { return universe_; }
    std::size_t size() const noexcept { return keys_.size(); }
    std::uint64_t key(std::size_t index) const { return keys_.raw(index - 1); }

    /// Largest key <= x, or nullopt.
    std::optional<PredecessorHit> predecessor(std::uint64_t x) const {
        if (x < 1 || x > universe_) throw InvalidInput("query outside universe");
        if (reps_ == 0) return std::nullopt;
        const auto rep = predecessor_rep(x);
        if (!rep) return std::nullopt;
        // Last key <= x inside the bucket headed by *rep.
        std::size_t lo = *rep * bucket_;
        std::size_t hi = std::min<std::size_t>(lo + bucket_, keys_.size()) - 1;
        while (lo < hi) {
            const std::size_t mid = lo + (hi - lo + 1) / 2;
            if (keys_[mid] <= x)
                lo = mid;
            else
                hi = mid - 1;
        }
        return PredecessorHit{keys_[lo], lo + 1};
    }

    /// Smallest key >= x, or nullopt.
    std::optional<PredecessorHit> successor(std::uint64_t x) const {
        if (x < 1 || x > universe_) throw InvalidInput("query outside universe");
        const auto p = predecessor(x);
        if (p && p->key == x) return p;
        const std::size_t next = p ? p->index : 0;  // 0-based index of the next key
        if (next >= keys_.size()) return std::nullopt;
        return PredecessorHit{keys_[next], next + 1};
    }

    /// Sorted keys plus one trie entry per (prefix length, distinct prefix),
    /// each entry holding the prefix and two representative indices.
    std::uint64_t space_bits() const noexcept {
        std::uint64_t entries = 0;
        for (const auto& level : levels_) entries += level.size();
        return keys_.space_bits() + entries * (bits_ + 2 * bit_width(reps_)) + 2 * 64;
    }

private:
    struct Node {
        std::size_t min_rep;
        std::size_t max_rep;
    };

    const Node* lookup(unsigned len, std::uint64_t x) const {
        probe::tick();
        const std::uint64_t prefix = len == 0 ? 0 : x >> (bits_ - len);
        const auto it = levels_[len].find(prefix);
        return it == levels_[len].end() ? nullptr : &it->second;
    }

    /// Index of the last bucket representative <= x.
    std::optional<std::size_t> predecessor_rep(std::uint64_t x) const {
        unsigned lo = 0, hi = bits_;
        const Node* best = lookup(0, x);
        while (lo < hi) {
            const unsigned mid = lo + (hi - lo + 1) / 2;
            if (const Node* node = lookup(mid, x)) {
                lo = mid;
                best = node;
            } else {
                hi = mid - 1;
            }
        }
        if (lo == bits_) return best->min_rep;  // exact hit
        const bool next_bit = (x >> (bits_ - lo - 1)) & 1;
        // The longest matching prefix has only the child opposite to x's next bit.
        if (next_bit) return best->max_rep;
        if (best->min_rep == 0) return std::nullopt;
        return best->min_rep - 1;
    }

    std::uint64_t universe_ = 0;
    unsigned bits_ = 0;
    std::size_t bucket_ = 1;
    std::size_t reps_ = 0;
    PackedArray keys_;
    std::vector<std::unordered_map<std::uint64_t, Node>> levels_;
};

}  // namespace succeq
