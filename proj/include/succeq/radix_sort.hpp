#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "succeq/bits.hpp"

namespace succeq {

/// Stable LSD radix sort on key(item) in [0, max_key], two passes of
/// ceil(bits/2)-bit digits, so O(m + sqrt(max_key)) time for m items.
template <class T, class KeyFn>
void radix_sort(std::vector<T>& items, KeyFn key, std::uint64_t max_key) {
    const unsigned bits = bit_width(max_key);
    if (items.size() < 2 || bits == 0) return;
    const unsigned digit = (bits + 1) / 2;
    const std::uint64_t buckets = std::uint64_t{1} << digit;
    std::vector<T> scratch(items.size());
    std::vector<std::size_t> count(buckets + 1);
    for (unsigned shift = 0; shift < bits; shift += digit) {
        std::fill(count.begin(), count.end(), 0);
        for (const T& item : items) ++count[((key(item) >> shift) & (buckets - 1)) + 1];
        for (std::uint64_t b = 0; b < buckets; ++b) count[b + 1] += count[b];
        for (T& item : items) scratch[count[(key(item) >> shift) & (buckets - 1)]++] = std::move(item);
        items.swap(scratch);
    }
}

}  // namespace succeq
