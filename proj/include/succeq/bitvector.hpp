#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <vector>

#include "succeq/bits.hpp"
#include "succeq/probe.hpp"

namespace succeq {

/// Static bit sequence with rank/select. Positions are 1-based.
///
/// Rank directory: absolute ones-count before every 512-bit superblock, so a
/// rank touches one directory entry and at most eight payload words.
///
/// Select directory: the position of every 32nd one is sampled. A block of 32
/// ones spanning fewer than 2048 bits is dense and is resolved by scanning at
/// most 33 payload words from its sample. A sparse block stores the offsets of
/// its remaining 31 ones explicitly; sparse blocks cover at least 2048 bits
/// each, so explicit offsets cost O(#ones * lg L) bits in the worst case.
class BitVector {
public:
    static constexpr std::uint64_t kSuperBits = 512;
    static constexpr std::uint64_t kSelectSample = 32;
    static constexpr std::uint64_t kDenseSpan = 2048;

    BitVector() { build_directory(); }

    explicit BitVector(const std::vector<bool>& bits) : length_(bits.size()) {
        words_.assign((length_ + 63) / 64, 0);
        for (std::uint64_t i = 0; i < length_; ++i)
            if (bits[i]) words_[i / 64] |= std::uint64_t{1} << (i % 64);
        build_directory();
    }

    BitVector(std::vector<std::uint64_t> words, std::uint64_t length) : words_(std::move(words)), length_(length) {
        if (words_.size() != (length_ + 63) / 64) throw InvalidInput("bit vector word count mismatch");
        if (length_ % 64 != 0 && !words_.empty() && (words_.back() >> (length_ % 64)) != 0)
            throw InvalidInput("bits set beyond bit vector length");
        build_directory();
    }

    std::uint64_t size() const noexcept { return length_; }
    std::uint64_t ones() const noexcept { return ones_; }
    const std::vector<std::uint64_t>& words() const noexcept { return words_; }

    bool get(std::uint64_t pos) const {
        if (pos < 1 || pos > length_) throw InvalidInput("bit position out of range");
        return (words_[(pos - 1) / 64] >> ((pos - 1) % 64)) & 1;
    }

    std::vector<bool> to_bits() const {
        std::vector<bool> out(length_);
        for (std::uint64_t i = 0; i < length_; ++i) out[i] = (words_[i / 64] >> (i % 64)) & 1;
        return out;
    }

    /// Number of ones in positions [1, pos].
    std::uint64_t rank1(std::uint64_t pos) const {
        if (pos > length_) throw InvalidInput("rank position out of range");
        const std::uint64_t sb = pos / kSuperBits;
        std::uint64_t count = super_[sb];
        const std::uint64_t first_word = sb * (kSuperBits / 64);
        const std::uint64_t full_words = pos / 64;
        for (std::uint64_t w = first_word; w < full_words; ++w) count += popcount_probe(words_[w]);
        if (const unsigned rest = pos % 64; rest != 0) count += popcount_probe(words_[full_words] & low_mask(rest));
        return count;
    }

    /// Position of the j-th one, or nullopt when fewer than j ones exist.
    std::optional<std::uint64_t> select1(std::uint64_t j) const {
        if (j < 1 || j > ones_) return std::nullopt;
        const std::uint64_t block = (j - 1) / kSelectSample;
        const std::uint64_t r = (j - 1) % kSelectSample;
        const std::uint64_t first = samples_[block];  // 0-based
        if (r == 0) return first + 1;
        if (const std::uint64_t slot = sparse_slot_[block]; slot != 0)
            return first + sparse_offsets_[(slot - 1) * (kSelectSample - 1) + (r - 1)] + 1;
        // Dense block: the r-th one strictly after `first`.
        std::uint64_t w = first / 64;
        std::uint64_t word = words_[w] & ~low_mask(first % 64 + 1);
        probe::tick();
        std::uint64_t need = r;
        for (;;) {
            const std::uint64_t c = static_cast<std::uint64_t>(std::popcount(word));
            if (need <= c) return w * 64 + select_in_word(word, need) + 1;
            need -= c;
            word = words_[++w];
            probe::tick();
        }
    }

    /// Position of the first one strictly after pos (1-based), or nullopt.
    std::optional<std::uint64_t> next_one(std::uint64_t pos) const {
        if (pos >= length_) return std::nullopt;
        std::uint64_t w = pos / 64;
        std::uint64_t word = words_[w] & ~low_mask(pos % 64);
        probe::tick();
        while (word == 0) {
            if (++w == words_.size()) return std::nullopt;
            word = words_[w];
            probe::tick();
        }
        return w * 64 + static_cast<std::uint64_t>(std::countr_zero(word)) + 1;
    }

    /// Payload bits plus every directory array plus the two scalar counters.
    std::uint64_t space_bits() const noexcept {
        return length_ + super_.space_bits() + samples_.space_bits() + sparse_slot_.space_bits() +
               sparse_offsets_.space_bits() + 2 * 64;
    }

    std::uint64_t directory_bits() const noexcept { return space_bits() - length_; }

    friend bool operator==(const BitVector& a, const BitVector& b) {
        return a.length_ == b.length_ && a.words_ == b.words_;
    }

private:
    static std::uint64_t popcount_probe(std::uint64_t w) noexcept {
        probe::tick();
        return static_cast<std::uint64_t>(std::popcount(w));
    }

    /// 0-based index of the r-th (1-based) set bit of w.
    static unsigned select_in_word(std::uint64_t w, std::uint64_t r) noexcept {
        for (std::uint64_t i = 1; i < r; ++i) w &= w - 1;
        return static_cast<unsigned>(std::countr_zero(w));
    }

    void build_directory() {
        ones_ = 0;
        for (auto w : words_) ones_ += static_cast<std::uint64_t>(std::popcount(w));

        const std::uint64_t supers = length_ / kSuperBits + 1;
        super_ = PackedArray(supers, bit_width(ones_));
        std::uint64_t running = 0;
        for (std::uint64_t sb = 0; sb < supers; ++sb) {
            super_.set(sb, running);
            const std::uint64_t end = std::min<std::uint64_t>((sb + 1) * (kSuperBits / 64), words_.size());
            for (std::uint64_t w = sb * (kSuperBits / 64); w < end; ++w)
                running += static_cast<std::uint64_t>(std::popcount(words_[w]));
        }

        std::vector<std::uint64_t> positions;
        positions.reserve(ones_);
        for (std::uint64_t w = 0; w < words_.size(); ++w)
            for (std::uint64_t bits = words_[w]; bits != 0; bits &= bits - 1)
                positions.push_back(w * 64 + static_cast<std::uint64_t>(std::countr_zero(bits)));

        const std::uint64_t blocks = (ones_ + kSelectSample - 1) / kSelectSample;
        std::vector<std::uint64_t> samples(blocks), slots(blocks, 0), offsets;
        for (std::uint64_t b = 0; b < blocks; ++b) {
            const std::uint64_t lo = b * kSelectSample;
            const std::uint64_t hi = std::min(lo + kSelectSample, ones_) - 1;
            samples[b] = positions[lo];
            if (positions[hi] - positions[lo] >= kDenseSpan) {
                slots[b] = offsets.size() / (kSelectSample - 1) + 1;
                for (std::uint64_t i = 1; i < kSelectSample; ++i)
                    offsets.push_back(lo + i <= hi ? positions[lo + i] - positions[lo] : 0);
            }
        }
        samples_ = PackedArray::with_width(samples, bit_width(length_));
        sparse_slot_ = PackedArray::from(slots);
        sparse_offsets_ = PackedArray::from(offsets);
    }

    std::vector<std::uint64_t> words_;
    std::uint64_t length_ = 0;
    std::uint64_t ones_ = 0;
    PackedArray super_;
    PackedArray samples_;
    PackedArray sparse_slot_;
    PackedArray sparse_offsets_;
};

}  // namespace succeq
