#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "succeq/cli.hpp"

int main(int argc, char** argv) {
    using namespace succeq::cli;

    CLI::App app{"Succinct equivalence-class structures: build, query, stats, bench"};
    app.require_subcommand(1);

    std::string input, kind = "const", out_path, structure, pairs;
    std::uint64_t ops = 100000, seed = 1;

    auto* build = app.add_subcommand("build", "Build a structure from a class-size file or edge list");
    build->add_option("input", input, "Class-size file or edge list")->required();
    build->add_option("--kind", kind, "Structure kind")->check(CLI::IsMember(kind_names()));
    build->add_option("--out", out_path, "Output path")->required();

    auto* query = app.add_subcommand("query", "Answer same-class queries for pairs of user ids");
    query->add_option("structure", structure, "Built structure or label export")->required();
    query->add_option("pairs", pairs, "File of 'x y' lines")->required();

    auto* stats = app.add_subcommand("stats", "Report space per field against the lower bound");
    stats->add_option("structure", structure, "Built structure or label export")->required();

    auto* bench = app.add_subcommand("bench", "Run seeded random queries and report probe counts");
    bench->add_option("input", input, "Class-size file or edge list")->required();
    bench->add_option("--kind", kind, "Structure kind")->check(CLI::IsMember(kind_names()));
    bench->add_option("--ops", ops, "Number of operations");
    bench->add_option("--seed", seed, "Random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    if (*build) return cmd_build(input, kind, out_path, std::cout, std::cerr);
    if (*query) return cmd_query(structure, pairs, std::cout, std::cerr);
    if (*stats) return cmd_stats(structure, std::cout, std::cerr);
    return cmd_bench(input, kind, ops, seed, std::cout, std::cerr);
}
