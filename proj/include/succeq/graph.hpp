#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "succeq/dynamic_eq.hpp"
#include "succeq/error.hpp"
#include "succeq/partition.hpp"

namespace succeq {

struct EdgeListGraph {
    std::uint64_t n = 0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;  // 0-based endpoints
};

/// Bijection between user ids [0, n) and labels [1, n].
class UserLabelMap {
public:
    UserLabelMap() = default;

    static UserLabelMap identity(std::uint64_t n) {
        std::vector<Label> labels(n);
        std::iota(labels.begin(), labels.end(), Label{1});
        return UserLabelMap(std::move(labels));
    }

    /// labels[u] is the label of user u.
    explicit UserLabelMap(std::vector<Label> labels) : to_label_(std::move(labels)), to_user_(to_label_.size() + 1, kNone) {
        for (std::uint64_t u = 0; u < to_label_.size(); ++u) {
            const Label x = to_label_[u];
            if (x < 1 || x > to_label_.size() || to_user_[x] != kNone) throw InvalidInput("user map is not a bijection");
            to_user_[x] = u;
        }
    }

    std::uint64_t size() const noexcept { return to_label_.size(); }
    bool contains_user(std::uint64_t u) const noexcept { return u < to_label_.size(); }
    Label label(std::uint64_t user) const { return to_label_.at(user); }
    std::uint64_t user(Label x) const {
        if (x < 1 || x > size()) throw InvalidInput("label out of range");
        return to_user_[x];
    }
    const std::vector<Label>& labels() const noexcept { return to_label_; }

    void apply(const RelabelEvent& event) {
        if (event.size() != size()) throw InvalidInput("relabel size differs from map size");
        const std::vector<Label> moved = event.to_vector();
        for (auto& x : to_label_) x = moved[x - 1];
        for (std::uint64_t u = 0; u < to_label_.size(); ++u) to_user_[to_label_[u]] = u;
    }

    /// Bits a plain array of n labels would take; kept apart from succinct totals.
    std::uint64_t space_bits() const noexcept { return size() * bit_width(size()); }

private:
    static constexpr std::uint64_t kNone = ~std::uint64_t{0};
    std::vector<Label> to_label_;
    std::vector<std::uint64_t> to_user_;
};

struct Ingested {
    GroupSequence groups;
    UserLabelMap users;
    bool from_edges = false;
};

namespace detail {

inline std::uint64_t parse_uint(std::string_view token, std::size_t line) {
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || end != token.data() + token.size())
        throw ParseError("expected a non-negative integer, got '" + std::string(token) + "'", line);
    return v;
}

/// Non-comment tokens of each non-blank line, with 1-based line numbers.
inline std::vector<std::pair<std::size_t, std::vector<std::string>>> tokenize(std::istream& in) {
    std::vector<std::pair<std::size_t, std::vector<std::string>>> out;
    std::string line;
    for (std::size_t no = 1; std::getline(in, line); ++no) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ss(line);
        std::vector<std::string> tokens;
        for (std::string t; ss >> t;) tokens.push_back(std::move(t));
        if (!tokens.empty()) out.emplace_back(no, std::move(tokens));
    }
    return out;
}

class PlainUnionFind {
public:
    explicit PlainUnionFind(std::uint64_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::uint64_t find(std::uint64_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }

    void unite(std::uint64_t a, std::uint64_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::uint64_t> parent_;
};

}  // namespace detail

inline EdgeListGraph parse_edge_list(std::istream& in) {
    const auto lines = detail::tokenize(in);
    if (lines.empty()) throw ParseError("missing header 'n m'", 1);
    const auto& [hline, header] = lines.front();
    if (header.size() != 2) throw ParseError("header must be 'n m'", hline);
    EdgeListGraph g;
    g.n = detail::parse_uint(header[0], hline);
    const std::uint64_t m = detail::parse_uint(header[1], hline);
    if (g.n == 0) throw ParseError("graph has no vertices", hline);
    if (lines.size() - 1 != m)
        throw ParseError("header announces " + std::to_string(m) + " edges, found " + std::to_string(lines.size() - 1),
                         lines.size() > m + 1 ? lines[m + 1].first : lines.back().first);
    g.edges.reserve(m);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& [no, t] = lines[i];
        if (t.size() != 2) throw ParseError("edge line must be 'u v'", no);
        const std::uint64_t u = detail::parse_uint(t[0], no), v = detail::parse_uint(t[1], no);
        if (u >= g.n || v >= g.n) throw ParseError("vertex out of range [0, " + std::to_string(g.n) + ")", no);
        g.edges.emplace_back(u, v);
    }
    return g;
}

inline ClassSizes parse_class_sizes(std::istream& in) {
    ClassSizes sizes;
    for (const auto& [no, t] : detail::tokenize(in)) {
        if (t.size() != 1) throw ParseError("expected one class size per line", no);
        const std::uint64_t s = detail::parse_uint(t[0], no);
        if (s == 0) throw ParseError("class size must be positive", no);
        sizes.sizes.push_back(s);
    }
    if (sizes.sizes.empty()) throw ParseError("no class sizes");
    return sizes;
}

/// Components of the graph, labeled in the canonical layout. Within a group,
/// components go by smallest vertex and vertices by id.
inline Ingested ingest_graph(const EdgeListGraph& graph) {
    detail::PlainUnionFind uf(graph.n);
    for (const auto& [u, v] : graph.edges) uf.unite(u, v);
    std::vector<std::vector<std::uint64_t>> members;
    std::unordered_map<std::uint64_t, std::size_t> comp_of;
    for (std::uint64_t v = 0; v < graph.n; ++v) {
        auto [it, fresh] = comp_of.try_emplace(uf.find(v), members.size());
        if (fresh) members.emplace_back();
        members[it->second].push_back(v);
    }
    ClassSizes sizes;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_size;
    for (std::size_t c = 0; c < members.size(); ++c) {
        sizes.sizes.push_back(members[c].size());
        by_size[members[c].size()].push_back(c);
    }
    GroupSequence groups = normalize(sizes);
    std::vector<Label> labels(graph.n);
    Label next = 1;
    for (const auto& grp : groups.groups())
        for (std::size_t c : by_size.at(grp.size))
            for (std::uint64_t v : members[c]) labels[v] = next++;
    return {std::move(groups), UserLabelMap(std::move(labels)), true};
}

inline Ingested ingest_edge_list(std::istream& in) { return ingest_graph(parse_edge_list(in)); }

/// Reads a class-size file (one size per line) or an edge list (header
/// "n m"), told apart by the token count of the first non-blank line.
inline Ingested ingest_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("read from " + path + " failed");
    std::string text = buffer.str();
    std::istringstream probe(text);
    const auto lines = detail::tokenize(probe);
    std::istringstream body(text);
    if (!lines.empty() && lines.front().second.size() == 2) return ingest_edge_list(body);
    GroupSequence groups = normalize(parse_class_sizes(body));
    UserLabelMap users = UserLabelMap::identity(groups.n());
    return {std::move(groups), std::move(users), false};
}

}  // namespace succeq
