// Command-line front end: hydrofpv <verb> --config <path> [--out <dir>] [--seed <u64>]

#include "hydrofpv/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Long-term dispatch of a coupled hydropower and floating-PV plant"};
    app.require_subcommand(1);
    app.fallthrough();

    hydrofpv::cli::CommandOptions opts;
    std::string config, out;
    std::uint64_t seed = 0;
    app.add_option("--config", config, "Run configuration (INI)")->required()->check(CLI::ExistingFile);
    auto* out_opt = app.add_option("--out", out, "Output directory (default: [output] dir, else ./out)");
    auto* seed_opt = app.add_option("--seed", seed, "Base seed for monte-carlo");

    app.add_subcommand("fit-head", "Fit the power-law head curve to a volume-head table");
    app.add_subcommand("price", "Solve the monthly water price by bisection and write the dispatch");
    auto* sim = app.add_subcommand("simulate", "Roll out the fixed-price policy for given monthly prices");
    sim->add_option("--theta", opts.thetas, "Water price per month ($/m3)");
    std::string summary;
    auto* summary_opt = sim->add_option("--summary", summary, "Take prices from a price summary.json")
                            ->check(CLI::ExistingFile);
    app.add_subcommand("sweep", "Re-solve every month over a range of transmission capacities");
    app.add_subcommand("oracle-check", "Compare the policy with the dynamic-programming oracle on a short window");
    app.add_subcommand("monte-carlo", "Fixed-price policy under AR(1) forecast noise");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : hydrofpv::cli::kUsage;
    }

    opts.config = config;
    if (*out_opt) opts.out_dir = out;
    if (*seed_opt) opts.seed = seed;
    if (*summary_opt) opts.summary = summary;

    const std::string verb = app.get_subcommands().front()->get_name();
    return hydrofpv::cli::run(verb, opts, std::cout, std::cerr);
}
