#pragma once

#include "hydrofpv/model.hpp"

#include <vector>

namespace hydrofpv {

struct BisectionConfig {
    double lo = 0.0;    // $/m3
    double hi = 1.0;    // $/m3
    double tolerance = 1e-6;
    int max_bracket_expansions = 20;

    std::vector<std::string> violations() const;
};

// What solve_contract_price does when even a zero water price releases less
// than the contract asks for.
enum class InfeasiblePolicy {
    Throw,           // raise InfeasibleContract
    ReturnZeroPrice  // return the theta = 0 rollout with its (negative) residual
};

struct PriceIterate {
    double theta;
    double sigma;
};

struct ContractSolution {
    double theta_star = 0.0;
    Trajectory trajectory;
    double sigma = 0.0;
    double residual = 0.0;  // sigma - U
    int iterations = 0;     // bisection midpoints evaluated
    int bracket_expansions = 0;
    bool monotone = true;   // no evaluated pair contradicts a nonincreasing sigma
    bool feasible = true;   // false only under InfeasiblePolicy::ReturnZeroPrice
    std::vector<PriceIterate> iterates;  // every (theta, sigma) evaluated, in order
};

// Total release of the fixed-price rollout.
double sigma(double theta, const ExogenousSeries& series, StepSpan span, const InitialState& initial,
             const SystemParams& params, const HeadCurve& curve);

// Bisection on the water price so the rollout's total release meets the
// contract. sigma(theta) > U moves the lower bracket up; otherwise the upper
// bracket comes down. The returned price is the evaluated iterate with the
// smallest |sigma - U| (latest wins ties), and the trajectory is the rollout
// at that price.
ContractSolution solve_contract_price(const ExogenousSeries& series, const Contract& contract,
                                      const InitialState& initial, const SystemParams& params,
                                      const HeadCurve& curve, const BisectionConfig& cfg = {},
                                      InfeasiblePolicy on_infeasible = InfeasiblePolicy::Throw);

// Solves consecutive monthly contracts, seeding each month with the previous
// month's terminal volume and release. Errors carry the month index.
std::vector<ContractSolution> solve_multi_month(const ExogenousSeries& series, const std::vector<Contract>& contracts,
                                                const InitialState& initial, const SystemParams& params,
                                                const HeadCurve& curve, const BisectionConfig& cfg = {},
                                                InfeasiblePolicy on_infeasible = InfeasiblePolicy::Throw);

struct SweepRow {
    double transmission;  // P, MWh
    std::size_t month;
    std::string label;
    double theta_star;
    double revenue;
    double sigma;
    double residual;
    bool feasible;
};

// Re-solves every month for each transmission capacity. Cells for distinct P
// values run concurrently; output order is (P as given, month).
// Months that cannot be met even at theta = 0 (e.g. P = 0) are reported at
// theta = 0 with feasible = false rather than aborting the sweep.
std::vector<SweepRow> sweep_capacity(const ExogenousSeries& series, const std::vector<Contract>& contracts,
                                     const InitialState& initial, const SystemParams& params,
                                     const HeadCurve& curve, const BisectionConfig& cfg,
                                     const std::vector<double>& p_values);

}  // namespace hydrofpv
