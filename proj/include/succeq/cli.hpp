#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "succeq/dynamic_eq.hpp"
#include "succeq/error.hpp"
#include "succeq/graph.hpp"
#include "succeq/labeling.hpp"
#include "succeq/partition.hpp"
#include "succeq/probe.hpp"
#include "succeq/serialize.hpp"
#include "succeq/static_eq.hpp"

namespace succeq::cli {

enum Exit : int { kOk = 0, kUsage = 1, kParse = 2, kIo = 3 };

inline const std::vector<std::string>& kind_names() {
    static const std::vector<std::string> names{"compact", "fast", "const", "dynamic", "labels"};
    return names;
}

inline AnyIndex build_index(const std::string& kind, const GroupSequence& g) {
    if (kind == "compact") return CompactEq(g);
    if (kind == "fast") return FastEq(g);
    if (kind == "const") return ConstEq(g);
    if (kind == "dynamic") return DynEq(g);
    throw InvalidInput("unknown kind '" + kind + "'");
}

inline SpaceReport space_of(const AnyIndex& index) {
    return std::visit([](const auto& s) { return s.space(); }, index);
}

inline std::uint64_t n_of(const AnyIndex& index) {
    return std::visit([](const auto& s) -> std::uint64_t { return s.n(); }, index);
}

inline bool same(AnyIndex& index, Label x, Label y) {
    return std::visit(
        [&](auto& s) {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, DynEq>)
                return s.same(x, y);
            else
                return s.same_class(x, y);
        },
        index);
}

/// Per-user bit labels from a "id<TAB>binary" export.
struct LabelExport {
    std::vector<BitLabel> labels;
    std::uint64_t n() const noexcept { return labels.size(); }
};

inline void write_label_export(std::ostream& out, const GroupSequence& g, const UserLabelMap& users) {
    const auto labels = bit_labels_for_layout(g);
    for (std::uint64_t u = 0; u < users.size(); ++u) out << u << '\t' << to_string(labels[users.label(u) - 1]) << '\n';
}

inline LabelExport read_label_export(std::istream& in) {
    LabelExport ex;
    std::vector<bool> seen;
    std::vector<std::pair<std::uint64_t, BitLabel>> rows;
    std::string line;
    for (std::size_t no = 1; std::getline(in, line); ++no) {
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError("expected 'id<TAB>label'", no);
        const std::uint64_t id = succeq::detail::parse_uint(std::string_view(line).substr(0, tab), no);
        try {
            rows.emplace_back(id, parse_bit_label(std::string_view(line).substr(tab + 1)));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), no);
        }
    }
    if (rows.empty()) throw ParseError("empty label export");
    ex.labels.resize(rows.size());
    seen.assign(rows.size(), false);
    for (const auto& [id, label] : rows) {
        if (id >= rows.size() || seen[id]) throw ParseError("label export ids must be 0..n-1, each once");
        seen[id] = true;
        ex.labels[id] = label;
    }
    return ex;
}

namespace detail {

inline bool is_binary_structure(const std::string& bytes) {
    return bytes.size() >= 4 && static_cast<unsigned char>(bytes[0]) == 'S' && bytes[1] == 'C' && bytes[2] == 'E' && bytes[3] == 'Q';
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kParse;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << '\n';
        return kIo;
    } catch (const InvalidInput& e) {
        err << "invalid input: " << e.what() << '\n';
        return kParse;
    }
}

inline double ratio(std::uint64_t bits, std::uint64_t bound) {
    return static_cast<double>(bits) / static_cast<double>(std::max<std::uint64_t>(1, bound));
}

}  // namespace detail

/// Builds `kind` over the input and writes it to out_path. Prints one JSON
/// summary line.
inline int cmd_build(const std::string& input, const std::string& kind, const std::string& out_path, std::ostream& out,
                     std::ostream& err) {
    return detail::guarded(err, [&] {
        const Ingested in = ingest_input(input);
        const GroupSequence& g = in.groups;
        const std::uint64_t bound = info_lower_bound_bits(g.n());
        nlohmann::ordered_json summary{{"kind", kind}, {"n", g.n()}, {"c", g.classes()}, {"k", g.k()}};
        if (kind == "labels") {
            std::ofstream file(out_path);
            if (!file) throw IoError("cannot open " + out_path + " for writing");
            write_label_export(file, g, in.users);
            if (!file) throw IoError("write to " + out_path + " failed");
            std::uint64_t total = 0, longest = 0;
            for (const auto& label : bit_labels_for_layout(g)) {
                total += label.length;
                longest = std::max<std::uint64_t>(longest, label.length);
            }
            summary["bits"] = total;
            summary["max_label_bits"] = longest;
            if (g.n() >= 2) summary["label_bound_bits"] = label_length_bound(g.n());
        } else {
            const AnyIndex index = build_index(kind, g);
            save_file(out_path, index, &in.users.labels());
            summary["bits"] = total_bits(space_of(index));
        }
        summary["info_lower_bound_bits"] = bound;
        summary["ratio"] = detail::ratio(summary["bits"].get<std::uint64_t>(), bound);
        out << summary.dump() << '\n';
        return kOk;
    });
}

/// Answers "x y" user-id pairs with "x y 0|1". Unknown ids and malformed
/// lines produce an error line and a nonzero exit once all pairs are done.
inline int cmd_query(const std::string& structure_path, const std::string& pairs_path, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const std::string bytes = read_file(structure_path);
        std::function<bool(std::uint64_t, std::uint64_t)> answer;
        std::uint64_t n = 0;
        std::optional<Archive> archive;
        LabelExport labels;
        std::optional<BitLabelCodec> codec;
        if (detail::is_binary_structure(bytes)) {
            archive = deserialize(bytes);
            n = n_of(archive->index);
            if (!archive->user_map) archive->user_map = UserLabelMap::identity(n).labels();
            answer = [&](std::uint64_t u, std::uint64_t v) { return same(archive->index, (*archive->user_map)[u], (*archive->user_map)[v]); };
        } else {
            std::istringstream in(bytes);
            labels = read_label_export(in);
            n = labels.n();
            codec.emplace(n);
            answer = [&](std::uint64_t u, std::uint64_t v) { return codec->equivalent(labels.labels[u], labels.labels[v]); };
        }

        std::ifstream pairs(pairs_path);
        if (!pairs) throw IoError("cannot open " + pairs_path);
        int status = kOk;
        std::string line;
        for (std::size_t no = 1; std::getline(pairs, line); ++no) {
            if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
            std::istringstream ss(line);
            std::vector<std::string> t;
            for (std::string tok; ss >> tok;) t.push_back(tok);
            if (t.empty()) continue;
            try {
                if (t.size() != 2) throw ParseError("expected 'x y'", no);
                const std::uint64_t u = succeq::detail::parse_uint(t[0], no), v = succeq::detail::parse_uint(t[1], no);
                if (u >= n) throw ParseError("unknown id " + t[0], no);
                if (v >= n) throw ParseError("unknown id " + t[1], no);
                out << u << ' ' << v << ' ' << (answer(u, v) ? 1 : 0) << '\n';
            } catch (const ParseError& e) {
                out << "error " << e.what() << '\n';
                status = kParse;
            }
        }
        if (pairs.bad()) throw IoError("read from " + pairs_path + " failed");
        return status;
    });
}

/// Space breakdown against the information-theoretic bound. The user map is
/// listed but kept out of the total.
inline int cmd_stats(const std::string& structure_path, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const std::string bytes = read_file(structure_path);
        SpaceReport report;
        std::uint64_t n = 0, user_map_bits = 0;
        std::string kind;
        if (detail::is_binary_structure(bytes)) {
            const Archive archive = deserialize(bytes);
            n = n_of(archive.index);
            kind = kind_name(kind_of(archive.index));
            report = space_of(archive.index);
            if (archive.user_map) user_map_bits = n * bit_width(n);
        } else {
            std::istringstream in(bytes);
            const LabelExport ex = read_label_export(in);
            n = ex.n();
            kind = "labels";
            std::uint64_t total = 0;
            for (const auto& l : ex.labels) total += l.length;
            report = {{"label_bits", total}};
        }
        const std::uint64_t total = total_bits(report);
        const std::uint64_t bound = info_lower_bound_bits(n);
        const double root = std::sqrt(static_cast<double>(n));
        const double lg = std::max(1.0, std::log2(static_cast<double>(n)));
        out << "kind " << kind << '\n' << "n " << n << '\n';
        for (const auto& f : report) out << "field." << f.name << ' ' << f.bits << '\n';
        out << "total_bits " << total << '\n';
        out << "info_lower_bound_bits " << bound << '\n';
        out << std::setprecision(6);
        out << "ratio_to_bound " << detail::ratio(total, bound) << '\n';
        out << "bits_per_sqrt_n " << total / root << '\n';
        out << "bits_per_sqrt_n_lg_n " << total / (root * lg) << '\n';
        out << "user_map_bits_excluded " << user_map_bits << '\n';
        return kOk;
    });
}

/// Random same-class queries (and, for dynamic, interleaved unions) under a
/// fixed seed. Everything on `out` is deterministic; timing goes to `err`.
inline int cmd_bench(const std::string& input, const std::string& kind, std::uint64_t ops, std::uint64_t seed, std::ostream& out,
                     std::ostream& err) {
    return detail::guarded(err, [&] {
        const Ingested in = ingest_input(input);
        const GroupSequence& g = in.groups;
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<Label> pick(1, g.n());
        std::map<std::uint64_t, std::uint64_t> histogram;
        std::uint64_t yes = 0, unions = 0;
        const auto start = std::chrono::steady_clock::now();

        if (kind == "labels") {
            const BitLabelCodec codec(g.n());
            const auto labels = bit_labels_for_layout(g);
            for (std::uint64_t op = 0; op < ops; ++op) {
                const Label x = pick(rng), y = pick(rng);
                probe::Scope scope;
                yes += codec.equivalent(labels[x - 1], labels[y - 1]);
                ++histogram[scope.count()];
            }
        } else {
            AnyIndex index = build_index(kind, g);
            DynEq* dyn = std::get_if<DynEq>(&index);
            for (std::uint64_t op = 0; op < ops; ++op) {
                const Label x = pick(rng), y = pick(rng);
                if (dyn && op % 2 == 0) {
                    unions += dyn->unite(x, y).merged;
                    continue;
                }
                probe::Scope scope;
                yes += same(index, x, y);
                ++histogram[scope.count()];
            }
            if (dyn) out << "unions " << unions << "\nrebuilds " << dyn->rebuilds() << '\n';
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        std::uint64_t queries = 0, max_probes = 0;
        for (const auto& [p, c] : histogram) {
            queries += c;
            max_probes = std::max(max_probes, p);
        }
        out << "kind " << kind << "\nn " << g.n() << "\nk " << g.k() << "\nops " << ops << "\nseed " << seed << '\n';
        out << "queries " << queries << "\nsame " << yes << "\nmax_probes " << max_probes << '\n';
        for (const auto& [p, c] : histogram) out << "probes " << p << ' ' << c << '\n';
        err << std::fixed << std::setprecision(0) << "throughput_ops_per_s " << (secs > 0 ? ops / secs : 0.0) << '\n';
        return kOk;
    });
}

}  // namespace succeq::cli
