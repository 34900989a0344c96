#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <queue>
#include <random>
#include <sstream>

#include "succeq/cli.hpp"
#include "succeq/graph.hpp"

using namespace succeq;
using namespace succeq::cli;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() : path_(fs::temp_directory_path() / ("succeq_cli_" + std::to_string(std::random_device{}()))) {
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }

    std::string write(const std::string& name, const std::string& text) const {
        const auto p = (path_ / name).string();
        std::ofstream(p) << text;
        return p;
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

std::vector<std::uint64_t> sorted_sizes(const GroupSequence& g) {
    auto s = g.class_sizes().sizes;
    std::sort(s.begin(), s.end());
    return s;
}

std::vector<std::uint64_t> bfs_components(std::uint64_t n, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& edges) {
    std::vector<std::vector<std::uint64_t>> adj(n);
    for (auto [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<std::uint64_t> comp(n, n);
    for (std::uint64_t s = 0; s < n; ++s) {
        if (comp[s] != n) continue;
        std::queue<std::uint64_t> q;
        q.push(s);
        comp[s] = s;
        while (!q.empty()) {
            const auto v = q.front();
            q.pop();
            for (auto w : adj[v])
                if (comp[w] == n) {
                    comp[w] = s;
                    q.push(w);
                }
        }
    }
    return comp;
}

std::string edge_list_text(std::uint64_t n, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& edges) {
    std::ostringstream out;
    out << n << ' ' << edges.size() << '\n';
    for (auto [u, v] : edges) out << u << ' ' << v << '\n';
    return out.str();
}

}  // namespace

TEST(Ingest, EdgeListExamples) {
    std::istringstream a("4 2\n0 1\n2 3\n");
    EXPECT_EQ(sorted_sizes(ingest_edge_list(a).groups), (std::vector<std::uint64_t>{2, 2}));
    std::istringstream b("3 0\n");
    EXPECT_EQ(sorted_sizes(ingest_edge_list(b).groups), (std::vector<std::uint64_t>{1, 1, 1}));
    std::istringstream c("2 1\n0 0\n");
    EXPECT_EQ(sorted_sizes(ingest_edge_list(c).groups), (std::vector<std::uint64_t>{1, 1}));
}

TEST(Ingest, LayoutOrdersComponentsAndVertices) {
    std::istringstream in("6 3\n4 5\n0 2\n1 3\n");
    const Ingested got = ingest_edge_list(in);
    // Three pairs; by smallest vertex: {0,2}, {1,3}, {4,5}.
    EXPECT_EQ(got.users.labels(), (std::vector<Label>{1, 3, 2, 4, 5, 6}));
}

TEST(Ingest, ErrorsCarryLineNumbers) {
    auto line_of = [](const std::string& text) -> std::size_t {
        std::istringstream in(text);
        try {
            ingest_edge_list(in);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    EXPECT_EQ(line_of(""), 1u);
    EXPECT_EQ(line_of("3\n"), 1u);
    EXPECT_EQ(line_of("3 2\n0 1\n1 x\n"), 3u);
    EXPECT_EQ(line_of("3 1\n# comment\n0 3\n"), 3u);
    EXPECT_EQ(line_of("3 1\n0 1 2\n"), 2u);
    EXPECT_EQ(line_of("3 1\n0 1\n1 2\n"), 3u);
    EXPECT_EQ(line_of("3 2\n0 1\n"), 2u);
    EXPECT_EQ(line_of("0 0\n"), 1u);
    EXPECT_EQ(line_of("3 1\n-1 2\n"), 2u);
}

TEST(Ingest, ClassSizeFiles) {
    std::istringstream ok("# sizes\n5\n\n1\n2 # trailing\n1\n");
    EXPECT_EQ(normalize(parse_class_sizes(ok)), normalize({{1, 1, 2, 5}}));
    std::istringstream empty("# nothing\n");
    EXPECT_THROW(parse_class_sizes(empty), ParseError);
    std::istringstream zero("3\n0\n");
    EXPECT_THROW(parse_class_sizes(zero), ParseError);
}

TEST(UserLabelMap, RejectsNonBijections) {
    EXPECT_THROW(UserLabelMap(std::vector<Label>{1, 1}), InvalidInput);
    EXPECT_THROW(UserLabelMap(std::vector<Label>{0, 1}), InvalidInput);
    const UserLabelMap m(std::vector<Label>{2, 3, 1});
    EXPECT_EQ(m.user(1), 2u);
    EXPECT_EQ(m.label(0), 2u);
}

TEST(UserLabelMap, StaysBijectiveAcrossRebuilds) {
    std::mt19937_64 rng(8);
    const std::uint64_t n = 3000;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
    DynEq d(normalize(ClassSizes{std::vector<std::uint64_t>(n, 1)}));
    UserLabelMap users = UserLabelMap::identity(n);
    for (int i = 0; i < 2000; ++i) {
        const std::uint64_t u = rng() % n, v = rng() % n;
        edges.emplace_back(u, v);
        MergeReport r = d.unite(users.label(u), users.label(v));
        if (r.relabel) users.apply(*r.relabel);
        for (std::uint64_t w = 0; w < n; w += 97) ASSERT_EQ(users.user(users.label(w)), w);
    }
    EXPECT_GE(d.rebuilds(), 3u);
    const auto comp = bfs_components(n, edges);
    for (int q = 0; q < 5000; ++q) {
        const std::uint64_t u = rng() % n, v = rng() % n;
        ASSERT_EQ(d.same(users.label(u), users.label(v)), comp[u] == comp[v]);
    }
}

TEST(CmdBuild, SummaryForWorkedExample) {
    TempDir dir;
    const auto sizes = dir.write("n9.txt", "1\n1\n2\n5\n");
    std::ostringstream out, err;
    ASSERT_EQ(cmd_build(sizes, "const", dir.file("n9.bin"), out, err), kOk) << err.str();
    const auto j = nlohmann::json::parse(out.str());
    EXPECT_EQ(j["n"], 9);
    EXPECT_EQ(j["c"], 4);
    EXPECT_EQ(j["k"], 3);
    EXPECT_EQ(j["info_lower_bound_bits"], 5);  // p(9) = 30
    EXPECT_GT(j["ratio"].get<double>(), 1.0);
    EXPECT_TRUE(fs::exists(dir.file("n9.bin")));
}

TEST(CmdBuild, LabelsExport) {
    TempDir dir;
    const auto sizes = dir.write("n9.txt", "1\n1\n2\n5\n");
    std::ostringstream out, err;
    ASSERT_EQ(cmd_build(sizes, "labels", dir.file("n9.labels"), out, err), kOk) << err.str();
    std::ifstream in(dir.file("n9.labels"));
    const LabelExport ex = read_label_export(in);
    ASSERT_EQ(ex.n(), 9u);
    for (const auto& l : ex.labels) EXPECT_LE(l.length, label_length_bound(9));
    const auto j = nlohmann::json::parse(out.str());
    EXPECT_LE(j["max_label_bits"].get<unsigned>(), 6u);
}

TEST(CmdBuild, Failures) {
    TempDir dir;
    std::ostringstream out, err;
    EXPECT_EQ(cmd_build(dir.write("empty.txt", ""), "const", dir.file("x"), out, err), kParse);
    EXPECT_EQ(cmd_build(dir.file("missing.txt"), "const", dir.file("x"), out, err), kIo);
    EXPECT_EQ(cmd_build(dir.write("bad.txt", "3 1\n0 9\n"), "const", dir.file("x"), out, err), kParse);
    EXPECT_EQ(cmd_build(dir.write("ok.txt", "2\n"), "const", "/nonexistent-dir/x", out, err), kIo);
    EXPECT_EQ(cmd_build(dir.write("ok2.txt", "2\n"), "bogus", dir.file("x"), out, err), kParse);
}

TEST(CmdQuery, AnswersAndErrors) {
    TempDir dir;
    const auto sizes = dir.write("n9.txt", "1\n1\n2\n5\n");
    for (const std::string kind : {"compact", "fast", "const", "dynamic", "labels"}) {
        std::ostringstream out, err;
        ASSERT_EQ(cmd_build(sizes, kind, dir.file("s." + kind), out, err), kOk) << kind << err.str();
        // Users are labels - 1 for a sizes file.
        const auto pairs = dir.write("pairs.txt", "2 3\n4 4\n0 1\n4 8\n0 9\nfoo\n");
        std::ostringstream qout, qerr;
        EXPECT_EQ(cmd_query(dir.file("s." + kind), pairs, qout, qerr), kParse) << kind;
        std::istringstream lines(qout.str());
        std::vector<std::string> got;
        for (std::string l; std::getline(lines, l);) got.push_back(l);
        ASSERT_EQ(got.size(), 6u) << kind;
        EXPECT_EQ(got[0], "2 3 1");
        EXPECT_EQ(got[1], "4 4 1");
        EXPECT_EQ(got[2], "0 1 0");
        EXPECT_EQ(got[3], "4 8 1");
        EXPECT_EQ(got[4].rfind("error", 0), 0u);
        EXPECT_EQ(got[5].rfind("error", 0), 0u);
    }
}

TEST(CmdQuery, CleanRunExitsZero) {
    TempDir dir;
    std::ostringstream out, err;
    ASSERT_EQ(cmd_build(dir.write("g.txt", "4 1\n0 3\n"), "fast", dir.file("g.bin"), out, err), kOk);
    std::ostringstream qout;
    EXPECT_EQ(cmd_query(dir.file("g.bin"), dir.write("p.txt", "0 3\n1 2\n"), qout, err), kOk);
    EXPECT_EQ(qout.str(), "0 3 1\n1 2 0\n");
}

TEST(CmdStats, ListsFieldsAndRatios) {
    TempDir dir;
    std::ostringstream out, err;
    ASSERT_EQ(cmd_build(dir.write("n9.txt", "1\n1\n2\n5\n"), "const", dir.file("n9.bin"), out, err), kOk);
    std::ostringstream sout;
    ASSERT_EQ(cmd_stats(dir.file("n9.bin"), sout, err), kOk);
    std::map<std::string, std::string> kv;
    std::istringstream lines(sout.str());
    for (std::string k, v; lines >> k >> v;) kv[k] = v;
    for (const char* f : {"field.prefix_sums", "field.counts", "field.pointers", "field.sqrt_tables"}) EXPECT_TRUE(kv.count(f)) << f;
    EXPECT_GT(std::stod(kv["ratio_to_bound"]), 1.0);
    EXPECT_GT(std::stod(kv["bits_per_sqrt_n"]), 0.0);
    EXPECT_GT(std::stod(kv["bits_per_sqrt_n_lg_n"]), 0.0);
    EXPECT_EQ(kv["user_map_bits_excluded"], "36");

    std::ostringstream cout_, serr;
    ASSERT_EQ(cmd_build(dir.write("one.txt", "8\n"), "compact", dir.file("one.bin"), out, err), kOk);
    ASSERT_EQ(cmd_stats(dir.file("one.bin"), cout_, serr), kOk);
    EXPECT_NE(cout_.str().find("field.delta_stream 4"), std::string::npos);  // one delta, 8 in four bits

    EXPECT_EQ(cmd_stats(dir.write("junk.bin", "SCEQ\x01"), cout_, serr), kParse);
    EXPECT_EQ(cmd_stats(dir.file("nope.bin"), cout_, serr), kIo);
}

TEST(CmdBench, DeterministicAndRebuilds) {
    TempDir dir;
    std::string ones;
    for (int i = 0; i < 400; ++i) ones += "1\n";
    const auto sizes = dir.write("ones.txt", ones);
    std::ostringstream a, b, err;
    ASSERT_EQ(cmd_bench(sizes, "dynamic", 200, 42, a, err), kOk) << err.str();
    ASSERT_EQ(cmd_bench(sizes, "dynamic", 200, 42, b, err), kOk);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_NE(a.str().find("rebuilds "), std::string::npos);
    EXPECT_EQ(a.str().find("rebuilds 0"), std::string::npos);
    std::ostringstream c;
    ASSERT_EQ(cmd_bench(sizes, "const", 1000, 42, c, err), kOk);
    EXPECT_NE(c.str().find("max_probes"), std::string::npos);
}

TEST(EndToEnd, EdgeListQueriesMatchBfs) {
    TempDir dir;
    std::mt19937_64 rng(99);
    for (std::uint64_t n : {1ull, 10ull, 500ull, 10000ull}) {
        for (double density : {0.0, 0.3, 0.9, 1.5}) {
            const std::uint64_t m = static_cast<std::uint64_t>(density * n);
            std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
            for (std::uint64_t i = 0; i < m; ++i) edges.emplace_back(rng() % n, rng() % n);
            const auto graph = dir.write("g.txt", edge_list_text(n, edges));
            std::ostringstream out, err;
            ASSERT_EQ(cmd_build(graph, "const", dir.file("g.bin"), out, err), kOk) << err.str();
            const auto comp = bfs_components(n, edges);
            std::ostringstream pairs;
            std::vector<bool> expect;
            for (int q = 0; q < 2000; ++q) {
                const std::uint64_t u = rng() % n;
                const std::uint64_t v = q % 3 == 0 ? u : rng() % n;
                pairs << u << ' ' << v << '\n';
                expect.push_back(comp[u] == comp[v]);
            }
            std::ostringstream qout;
            ASSERT_EQ(cmd_query(dir.file("g.bin"), dir.write("p.txt", pairs.str()), qout, err), kOk);
            std::istringstream lines(qout.str());
            std::uint64_t u, v, ans;
            for (bool want : expect) {
                ASSERT_TRUE(lines >> u >> v >> ans);
                ASSERT_EQ(ans == 1, want) << n << " " << u << " " << v;
            }
        }
    }
}
