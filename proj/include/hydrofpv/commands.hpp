#pragma once

#include "hydrofpv/error.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hydrofpv::cli {

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kConfig = 2,    // parse and io
    kModel = 3,     // domain, fit, invalid input
    kPolicy = 4,    // unsupported price, degenerate head
    kPricer = 5,    // infeasible contract, bracket failure
    kOracle = 6,
    kScenario = 7,
    kUsage = 64,
};

int exit_code_for(ErrorCode code);

struct CommandOptions {
    std::filesystem::path config;
    std::optional<std::filesystem::path> out_dir;  // overrides [output] dir; default "out"
    std::optional<std::uint64_t> seed;
    std::vector<double> thetas;                    // simulate: one per month
    std::optional<std::filesystem::path> summary;  // simulate: take thetas from a price summary
};

// Runs one verb ("fit-head", "price", "simulate", "sweep", "oracle-check",
// "monte-carlo"). Outputs are written only after the whole computation
// succeeded. On failure, writes a JSON error object to `err` and returns a
// nonzero exit code. A one-line human summary goes to `log`.
int run(const std::string& verb, const CommandOptions& opts, std::ostream& log, std::ostream& err);

}  // namespace hydrofpv::cli
