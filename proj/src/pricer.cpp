#include "hydrofpv/pricer.hpp"

#include "hydrofpv/error.hpp"
#include "hydrofpv/parallel.hpp"
#include "hydrofpv/policy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hydrofpv {

std::vector<std::string> BisectionConfig::violations() const {
    std::vector<std::string> out;
    if (!(std::isfinite(lo) && lo >= 0.0)) out.emplace_back("bisection lower bracket must be finite and nonnegative");
    if (!(std::isfinite(hi) && hi > lo)) out.emplace_back("bisection upper bracket must exceed the lower bracket");
    if (!(tolerance > 0.0)) out.emplace_back("bisection tolerance must be positive");
    if (max_bracket_expansions < 0) out.emplace_back("max bracket expansions must be nonnegative");
    return out;
}

double sigma(double theta, const ExogenousSeries& series, StepSpan span, const InitialState& initial,
             const SystemParams& params, const HeadCurve& curve) {
    if (!(theta >= 0.0)) throw Error(ErrorCode::Domain, "water price must be nonnegative");
    return rollout(theta, series, span, initial, params, curve).total_release;
}

namespace {

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += "; ";
        out += p;
    }
    return out;
}

bool is_monotone(std::vector<PriceIterate> its) {
    std::sort(its.begin(), its.end(), [](const auto& a, const auto& b) { return a.theta < b.theta; });
    for (std::size_t i = 1; i < its.size(); ++i)
        if (its[i].sigma > its[i - 1].sigma) return false;
    return true;
}

}  // namespace

ContractSolution solve_contract_price(const ExogenousSeries& series, const Contract& contract,
                                      const InitialState& initial, const SystemParams& params,
                                      const HeadCurve& curve, const BisectionConfig& cfg,
                                      InfeasiblePolicy on_infeasible) {
    if (auto v = cfg.violations(); !v.empty()) throw Error(ErrorCode::InvalidInput, join(v));
    if (auto report = validate_inputs(params, series, contract, initial); !report.ok())
        throw Error(ErrorCode::InvalidInput, join(report.violations));

    const double target = contract.target_release;
    ContractSolution sol;
    auto eval = [&](double theta) {
        const double s = sigma(theta, series, contract.span, initial, params, curve);
        sol.iterates.push_back({theta, s});
        return s;
    };
    auto finish = [&](double theta) {
        sol.theta_star = theta;
        sol.trajectory = rollout(theta, series, contract.span, initial, params, curve);
        sol.sigma = sol.trajectory.total_release;
        sol.residual = sol.sigma - target;
        sol.monotone = is_monotone(sol.iterates);
        return sol;
    };

    double lo = cfg.lo;
    double hi = cfg.hi;
    double s_lo = eval(lo);
    if (s_lo < target && lo > 0.0) {
        // The price floor is zero; widen the bracket down to it once.
        hi = lo;
        lo = 0.0;
        ++sol.bracket_expansions;
        s_lo = eval(lo);
    }
    if (s_lo == target) return finish(lo);
    if (s_lo < target) {
        if (on_infeasible == InfeasiblePolicy::ReturnZeroPrice) {
            sol.feasible = false;
            return finish(0.0);
        }
        std::ostringstream msg;
        msg << "even free water cannot meet the contract: release at zero price is " << s_lo << " m3, contract is "
            << target << " m3";
        throw Error(ErrorCode::InfeasibleContract, msg.str());
    }

    double s_hi = eval(hi);
    while (s_hi > target) {
        if (sol.bracket_expansions >= cfg.max_bracket_expansions) {
            std::ostringstream msg;
            msg << "release at price " << hi << " is still " << s_hi << " m3, above the contract " << target
                << " m3, after " << sol.bracket_expansions << " bracket expansions";
            throw Error(ErrorCode::BracketFailure, msg.str());
        }
        lo = hi;
        hi *= 2.0;
        ++sol.bracket_expansions;
        s_hi = eval(hi);
    }
    if (s_hi == target) return finish(hi);

    while (hi - lo > cfg.tolerance) {
        const double mid = 0.5 * (lo + hi);
        const double s = eval(mid);
        ++sol.iterations;
        if (s > target)
            lo = mid;
        else
            hi = mid;
    }

    // Among all evaluated prices, keep the one closest to the contract. For a
    // continuous monotone sigma this is the final midpoint; for the step-shaped
    // sigma of the bang-bang policy it is the last iterate on the flat piece
    // that meets the contract.
    std::size_t best = 0;
    for (std::size_t i = 1; i < sol.iterates.size(); ++i)
        if (std::abs(sol.iterates[i].sigma - target) <= std::abs(sol.iterates[best].sigma - target)) best = i;
    return finish(sol.iterates[best].theta);
}

std::vector<ContractSolution> solve_multi_month(const ExogenousSeries& series, const std::vector<Contract>& contracts,
                                                const InitialState& initial, const SystemParams& params,
                                                const HeadCurve& curve, const BisectionConfig& cfg,
                                                InfeasiblePolicy on_infeasible) {
    for (std::size_t m = 1; m < contracts.size(); ++m) {
        if (contracts[m].span.begin != contracts[m - 1].span.end) {
            std::ostringstream msg;
            msg << "contract " << m << " does not start where contract " << m - 1 << " ends";
            throw Error(ErrorCode::InvalidInput, msg.str());
        }
    }

    std::vector<ContractSolution> out;
    out.reserve(contracts.size());
    InitialState state = initial;
    for (std::size_t m = 0; m < contracts.size(); ++m) {
        try {
            out.push_back(solve_contract_price(series, contracts[m], state, params, curve, cfg, on_infeasible));
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << "month " << m;
            if (!contracts[m].label.empty()) msg << " (" << contracts[m].label << ")";
            msg << ": " << e.what();
            throw Error(e.code(), msg.str());
        }
        state = out.back().trajectory.terminal();
    }
    return out;
}

std::vector<SweepRow> sweep_capacity(const ExogenousSeries& series, const std::vector<Contract>& contracts,
                                     const InitialState& initial, const SystemParams& params,
                                     const HeadCurve& curve, const BisectionConfig& cfg,
                                     const std::vector<double>& p_values) {
    if (p_values.empty()) throw Error(ErrorCode::InvalidInput, "sweep needs at least one transmission capacity");

    std::vector<std::vector<ContractSolution>> cells(p_values.size());
    parallel_for(p_values.size(), [&](std::size_t i) {
        SystemParams p = params;
        p.transmission = p_values[i];
        cells[i] = solve_multi_month(series, contracts, initial, p, curve, cfg, InfeasiblePolicy::ReturnZeroPrice);
    });

    std::vector<SweepRow> rows;
    rows.reserve(p_values.size() * contracts.size());
    for (std::size_t i = 0; i < p_values.size(); ++i) {
        for (std::size_t m = 0; m < contracts.size(); ++m) {
            const auto& sol = cells[i][m];
            rows.push_back({p_values[i], m, contracts[m].label, sol.theta_star, sol.trajectory.total_revenue, sol.sigma,
                            sol.residual, sol.feasible});
        }
    }
    return rows;
}

}  // namespace hydrofpv
