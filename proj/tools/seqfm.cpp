#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "seqfm/cli.hpp"

int main(int argc, char** argv) {
    using namespace seqfm;
    cli::CliConfig config;

    CLI::App app{"Sequential-access FM-index: build indexes and count patterns"};
    app.require_subcommand(1);

    auto* build = app.add_subcommand("build", "Build an index file from a raw byte file");
    build->add_option("--input", config.input, "Text file")->required();
    build->add_option("--output", config.output, "Index file to write")->required();
    build->add_option("--rate", config.rate, "Spacing ratio between consecutive levels");
    build->add_option("--finest", config.finest, "Spacing of the finest level");
    build->add_option("--mem-budget", config.mem_budget, "Byte budget for the resident level");
    build->add_flag("--strip-newline", config.strip_newline, "Drop one trailing newline from the input");

    std::string mode = "sequential";
    auto* count = app.add_subcommand("count", "Count occurrences of a pattern");
    count->add_option("--index", config.index, "Index file")->required();
    count->add_option("--pattern", config.pattern, "Pattern (literal bytes, or hex with --hex)")->required();
    count->add_flag("--hex", config.hex, "Pattern is hex-encoded");
    count->add_option("--mode", mode, "naive or sequential")->check(CLI::IsMember({"naive", "sequential"}));
    count->add_option("--trace", config.trace, "Write region,offset,length records here");

    auto* stats = app.add_subcommand("stats", "Print header fields and region geometry");
    stats->add_option("--index", config.index, "Index file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : cli::kExitError;
    }
    config.mode = mode == "naive" ? SearchMode::naive : SearchMode::sequential;

    if (build->parsed()) return cli::cmd_build(config, std::cout, std::cerr);
    if (count->parsed()) return cli::cmd_count(config, std::cout, std::cerr);
    return cli::cmd_stats(config, std::cout, std::cerr);
}
