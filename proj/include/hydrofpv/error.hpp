#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hydrofpv {

// Every failure raised by the library carries one of these codes. The CLI maps
// the owning module of a code onto a process exit status.
enum class ErrorCode {
    Domain,             // argument outside the mathematical domain (e.g. negative volume)
    FitFailure,         // degenerate head-curve data
    InvalidInput,       // a type invariant is violated
    UnsupportedInput,   // input the closed-form policy does not cover (negative price)
    DegenerateHead,     // zero hydraulic head where a division by it is required
    InfeasibleContract, // even free water cannot meet the contract
    BracketFailure,     // upper price bracket could not be expanded far enough
    OracleInfeasible,   // discretized problem has no feasible terminal state
    OracleRefused,      // horizon beyond the oracle's tractability guard
    Scenario,           // noise generation or Monte Carlo failure
    Parse,              // CSV or config parse failure
    Io,                 // filesystem failure
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace hydrofpv
