#pragma once

#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "succeq/error.hpp"
#include "succeq/probe.hpp"

namespace succeq {

using Label = std::uint64_t;

/// Number of bits needed to write v in binary; 0 for v == 0.
constexpr unsigned bit_width(std::uint64_t v) noexcept { return static_cast<unsigned>(std::bit_width(v)); }

/// floor(lg v) for v >= 1.
constexpr unsigned floor_lg(std::uint64_t v) noexcept {
    assert(v != 0);
    return bit_width(v) - 1;
}

/// ceil(lg v) for v >= 1; ceil_lg(1) == 0.
constexpr unsigned ceil_lg(std::uint64_t v) noexcept { return v <= 1 ? 0 : bit_width(v - 1); }

constexpr std::uint64_t low_mask(unsigned width) noexcept {
    return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

/// Reads `width` (<= 64) bits starting at bit `pos` of a little-endian word array.
inline std::uint64_t read_bits(std::span<const std::uint64_t> words, std::uint64_t pos, unsigned width) noexcept {
    if (width == 0) return 0;
    const std::size_t w = pos / 64;
    const unsigned off = pos % 64;
    std::uint64_t v = words[w] >> off;
    if (off + width > 64) v |= words[w + 1] << (64 - off);
    return v & low_mask(width);
}

inline void write_bits(std::span<std::uint64_t> words, std::uint64_t pos, unsigned width, std::uint64_t value) noexcept {
    if (width == 0) return;
    value &= low_mask(width);
    const std::size_t w = pos / 64;
    const unsigned off = pos % 64;
    words[w] = (words[w] & ~(low_mask(width) << off)) | (value << off);
    if (off + width > 64) {
        const unsigned spill = off + width - 64;
        words[w + 1] = (words[w + 1] & ~low_mask(spill)) | (value >> (64 - off));
    }
}

/// Append-only bit sequence builder.
class BitWriter {
public:
    void append(std::uint64_t value, unsigned width) {
        if (width == 0) return;
        const std::uint64_t need = (size_ + width + 63) / 64;
        if (words_.size() < need) words_.resize(need, 0);
        write_bits(words_, size_, width, value);
        size_ += width;
    }

    void push_back(bool bit) { append(bit ? 1 : 0, 1); }

    std::uint64_t size() const noexcept { return size_; }
    const std::vector<std::uint64_t>& words() const noexcept { return words_; }
    std::vector<std::uint64_t> release() && { return std::move(words_); }

private:
    std::vector<std::uint64_t> words_;
    std::uint64_t size_ = 0;
};

/// Fixed-width unsigned integer array, bit-packed. Width may be 0 (all zeros).
class PackedArray {
public:
    PackedArray() = default;

    PackedArray(std::size_t size, unsigned width) : size_(size), width_(width) {
        if (width > 64) throw InvalidInput("packed width exceeds 64 bits");
        words_.assign((size * width + 63) / 64, 0);
    }

    /// Packs `values` at the smallest width that holds max(values, floor).
    static PackedArray from(std::span<const std::uint64_t> values, std::uint64_t floor = 0) {
        std::uint64_t hi = floor;
        for (auto v : values) hi = v > hi ? v : hi;
        return with_width(values, bit_width(hi));
    }

    static PackedArray with_width(std::span<const std::uint64_t> values, unsigned width) {
        PackedArray a(values.size(), width);
        for (std::size_t i = 0; i < values.size(); ++i) a.set(i, values[i]);
        return a;
    }

    static PackedArray from_words(std::size_t size, unsigned width, std::vector<std::uint64_t> words) {
        if (width > 64 || words.size() != (size * width + 63) / 64)
            throw ParseError("packed array word count does not match size and width");
        PackedArray a;
        a.size_ = size;
        a.width_ = width;
        a.words_ = std::move(words);
        return a;
    }

    std::uint64_t operator[](std::size_t i) const noexcept {
        assert(i < size_);
        probe::tick();
        return read_bits(words_, i * width_, width_);
    }

    /// Unprobed read for build-time and serialization paths.
    std::uint64_t raw(std::size_t i) const noexcept { return read_bits(words_, i * width_, width_); }

    void set(std::size_t i, std::uint64_t v) {
        assert(i < size_);
        if (v > low_mask(width_)) throw InvalidInput("value does not fit packed width");
        write_bits(words_, i * width_, width_, v);
    }

    std::size_t size() const noexcept { return size_; }
    unsigned width() const noexcept { return width_; }
    bool empty() const noexcept { return size_ == 0; }
    const std::vector<std::uint64_t>& words() const noexcept { return words_; }

    std::uint64_t space_bits() const noexcept { return static_cast<std::uint64_t>(size_) * width_; }

    std::vector<std::uint64_t> to_vector() const {
        std::vector<std::uint64_t> out(size_);
        for (std::size_t i = 0; i < size_; ++i) out[i] = raw(i);
        return out;
    }

    friend bool operator==(const PackedArray& a, const PackedArray& b) {
        return a.size_ == b.size_ && a.width_ == b.width_ && a.words_ == b.words_;
    }

private:
    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
    unsigned width_ = 0;
};

}  // namespace succeq
