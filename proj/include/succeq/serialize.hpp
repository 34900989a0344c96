#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "succeq/bits.hpp"
#include "succeq/bitvector.hpp"
#include "succeq/dynamic_eq.hpp"
#include "succeq/error.hpp"
#include "succeq/static_eq.hpp"

namespace succeq {

// Layout (little endian):
//   u32 magic "SCEQ", u16 version, u16 kind, u64 n, u64 k, fields...
//   [u32 "UMAP", field]   optional user-id -> label map
// A field is u64 count, u8 width in [1, 64], then ceil(count * width / 64) u64 words.
// Only primary fields are stored; derived indexes are rebuilt on load.

enum class Kind : std::uint16_t { compact = 1, fast = 2, constant = 3, dynamic = 4 };

using AnyIndex = std::variant<CompactEq, FastEq, ConstEq, DynEq>;

struct Archive {
    AnyIndex index;
    std::optional<std::vector<Label>> user_map;  // user_map[u] = label of user u
};

inline constexpr std::uint32_t kMagic = 0x51454353;  // "SCEQ"
inline constexpr std::uint32_t kUserMapMagic = 0x50414d55;  // "UMAP"
inline constexpr std::uint16_t kFormatVersion = 1;

inline const char* kind_name(Kind kind) {
    switch (kind) {
        case Kind::compact: return "compact";
        case Kind::fast: return "fast";
        case Kind::constant: return "const";
        case Kind::dynamic: return "dynamic";
    }
    return "unknown";
}

inline Kind kind_of(const AnyIndex& index) { return static_cast<Kind>(index.index() + 1); }

namespace detail {

class ByteWriter {
public:
    template <class T>
    void put(T value) {
        for (std::size_t i = 0; i < sizeof(T); ++i) bytes_.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff));
    }

    void field(std::uint64_t count, unsigned width, std::span<const std::uint64_t> words) {
        put<std::uint64_t>(count);
        put<std::uint8_t>(static_cast<std::uint8_t>(width));
        const std::uint64_t need = (count * width + 63) / 64;
        for (std::uint64_t i = 0; i < need; ++i) put<std::uint64_t>(i < words.size() ? words[i] : 0);
    }

    void field(const PackedArray& a) { field(a.size(), a.width(), a.words()); }
    void field(const BitVector& b) { field(b.size(), 1, b.words()); }
    void field(const ShadowedSequence& s) {
        field(s.stream_bits(), 1, s.stream_words());
        field(s.starts());
    }

    std::string&& release() && { return std::move(bytes_); }

private:
    std::string bytes_;
};

class ByteReader {
public:
    explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

    template <class T>
    T get() {
        if (bytes_.size() - pos_ < sizeof(T)) throw ParseError("truncated file");
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += sizeof(T);
        return static_cast<T>(v);
    }

    struct Raw {
        std::uint64_t count;
        unsigned width;
        std::vector<std::uint64_t> words;
    };

    Raw raw_field() {
        Raw r;
        r.count = get<std::uint64_t>();
        r.width = get<std::uint8_t>();
        if (r.width == 0 || r.width > 64) throw ParseError("field width outside [1, 64]");
        const std::uint64_t remaining = (bytes_.size() - pos_) / 8;
        if (r.count > remaining * 64 / r.width) throw ParseError("field longer than file");
        const std::uint64_t need = (r.count * r.width + 63) / 64;
        r.words.reserve(need);
        for (std::uint64_t i = 0; i < need; ++i) r.words.push_back(get<std::uint64_t>());
        return r;
    }

    PackedArray packed() {
        Raw r = raw_field();
        return PackedArray::from_words(r.count, r.width, std::move(r.words));
    }

    BitVector bits() {
        Raw r = raw_field();
        if (r.width != 1) throw ParseError("bit vector field must have width 1");
        try {
            return BitVector(std::move(r.words), r.count);
        } catch (const InvalidInput& e) {
            throw ParseError(e.what());
        }
    }

    ShadowedSequence shadowed() {
        Raw stream = raw_field();
        if (stream.width != 1) throw ParseError("stream field must have width 1");
        BitVector starts = bits();
        if (starts.size() != stream.count) throw ParseError("shadow length differs from stream length");
        return ShadowedSequence::from_parts(std::move(stream.words), std::move(starts));
    }

    bool done() const noexcept { return pos_ == bytes_.size(); }
    std::size_t position() const noexcept { return pos_; }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

inline void write_const_fields(ByteWriter& w, const ConstEq& c) {
    w.field(c.prefix_sums());
    w.field(c.counts());
    w.field(c.pointers());
}

inline ConstEq read_const_fields(ByteReader& r, std::uint64_t n, std::shared_ptr<const SqrtTables> sqrt = nullptr) {
    PackedArray prefix = r.packed();
    PackedArray counts = r.packed();
    PackedArray pointers = r.packed();
    if (prefix.empty() || prefix.raw(prefix.size() - 1) != n) throw ParseError("prefix sums do not end at n");
    if (!sqrt) sqrt = std::make_shared<const SqrtTables>(SqrtTables::build_for_max(2 * n));
    return ConstEq::from_parts(n, prefix, counts, pointers, std::move(sqrt));
}

}  // namespace detail

inline std::string serialize(const AnyIndex& index, const std::vector<Label>* user_map = nullptr) {
    detail::ByteWriter w;
    w.put<std::uint32_t>(kMagic);
    w.put<std::uint16_t>(kFormatVersion);
    w.put<std::uint16_t>(static_cast<std::uint16_t>(kind_of(index)));
    std::visit(
        [&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            w.put<std::uint64_t>(s.n());
            if constexpr (std::is_same_v<S, DynEq>) {
                w.put<std::uint64_t>(s.base().k());
                detail::write_const_fields(w, s.base());
                w.put<std::uint64_t>(s.rebuilds());
                const auto forest = s.forest();
                std::vector<std::uint64_t> reps, parents, ranks;
                for (const auto& e : forest) {
                    reps.push_back(e.rep);
                    parents.push_back(e.parent_rep);
                    ranks.push_back(e.rank);
                }
                w.field(PackedArray::with_width(reps, bit_width(s.n())));
                w.field(PackedArray::with_width(parents, bit_width(s.n())));
                w.field(PackedArray::from(ranks, 1));
            } else {
                w.put<std::uint64_t>(s.k());
                if constexpr (std::is_same_v<S, ConstEq>) {
                    detail::write_const_fields(w, s);
                } else {
                    w.field(s.deltas());
                    w.field(s.counts());
                }
            }
        },
        index);
    if (user_map) {
        w.put<std::uint32_t>(kUserMapMagic);
        w.field(PackedArray::with_width(*user_map, bit_width(user_map->size())));
    }
    return std::move(w).release();
}

inline Archive deserialize(std::string_view bytes) {
    detail::ByteReader r(bytes);
    if (r.get<std::uint32_t>() != kMagic) throw ParseError("not a structure file (bad magic)");
    if (const auto v = r.get<std::uint16_t>(); v != kFormatVersion) throw ParseError("unsupported format version " + std::to_string(v));
    const auto kind = r.get<std::uint16_t>();
    const auto n = r.get<std::uint64_t>();
    const auto k = r.get<std::uint64_t>();
    if (n == 0) throw ParseError("empty structure");

    auto make = [&]() -> AnyIndex {
        switch (static_cast<Kind>(kind)) {
            case Kind::compact: {
                ShadowedSequence deltas = r.shadowed();
                ShadowedSequence counts = r.shadowed();
                return CompactEq::from_parts(n, std::move(deltas), std::move(counts));
            }
            case Kind::fast: {
                ShadowedSequence deltas = r.shadowed();
                PackedArray counts = r.packed();
                return FastEq::from_parts(n, std::move(deltas), counts);
            }
            case Kind::constant: return detail::read_const_fields(r, n);
            case Kind::dynamic: {
                ConstEq base = detail::read_const_fields(r, n);
                const auto rebuilds = r.get<std::uint64_t>();
                const auto reps = r.packed().to_vector();
                const auto parents = r.packed().to_vector();
                const auto ranks = r.packed().to_vector();
                if (reps.size() != parents.size() || reps.size() != ranks.size()) throw ParseError("forest fields differ in length");
                std::vector<ForestEntry> forest;
                for (std::size_t i = 0; i < reps.size(); ++i)
                    forest.push_back({reps[i], parents[i], static_cast<std::uint32_t>(ranks[i])});
                return DynEq::from_parts(std::move(base), forest, rebuilds);
            }
        }
        throw ParseError("unknown structure kind " + std::to_string(kind));
    };
    Archive out{make(), std::nullopt};
    const std::uint64_t got_k = std::visit(
        [](const auto& s) -> std::uint64_t {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, DynEq>)
                return s.base().k();
            else
                return s.k();
        },
        out.index);
    if (got_k != k) throw ParseError("group count differs from header");
    // Decodable but non-canonical encodings are rejected, so load/save is bit-exact.
    if (serialize(out.index) != bytes.substr(0, r.position())) throw ParseError("structure fields are not in canonical form");

    if (!r.done()) {
        if (r.get<std::uint32_t>() != kUserMapMagic) throw ParseError("unknown trailing section");
        auto map = r.packed().to_vector();
        if (map.size() != n) throw ParseError("user map size differs from n");
        std::vector<bool> seen(n + 1, false);
        for (auto label : map) {
            if (label < 1 || label > n || seen[label]) throw ParseError("user map is not a permutation");
            seen[label] = true;
        }
        out.user_map = std::move(map);
        if (!r.done()) throw ParseError("trailing bytes after user map");
    }
    return out;
}

inline void save_file(const std::string& path, const AnyIndex& index, const std::vector<Label>* user_map = nullptr) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    const std::string bytes = serialize(index, user_map);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write to " + path + " failed");
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read from " + path + " failed");
    return bytes;
}

inline Archive load_file(const std::string& path) { return deserialize(read_file(path)); }

}  // namespace succeq
