#include "hydrofpv/oracle.hpp"

#include "hydrofpv/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace hydrofpv {

GridStepResult grid_subproblem(double theta, const StepInput& in, const SystemParams& params,
                               const HeadCurve& curve, std::size_t n) {
    if (n == 0) throw Error(ErrorCode::InvalidInput, "grid size must be positive");
    const ReleaseBox box = release_box(params, in.u_prev);
    if (box.lo > box.hi) throw Error(ErrorCode::OracleInfeasible, "empty feasible release box");

    const double per_m3 = energy_per_m3(params, head(curve, in.v_prev).meters);
    const double s = std::min(in.alpha * params.solar_capacity, params.transmission);
    const double headroom = params.transmission - s;

    GridStepResult best{box.lo, -std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < n; ++i) {
        const double u = n == 1 ? box.lo
                                : (i + 1 == n ? box.hi
                                              : box.lo + (box.hi - box.lo) * static_cast<double>(i) /
                                                             static_cast<double>(n - 1));
        const double h = std::min(headroom, per_m3 * u);
        const double obj = in.lambda * (h + s) - theta * u;
        if (obj > best.objective) best = {u, obj};
    }
    return best;
}

namespace {

struct StepEconomics {
    double s;
    double headroom;
    double lambda;
};

double step_revenue(const StepEconomics& e, double per_m3, double u) {
    return e.lambda * (e.s + std::min(e.headroom, per_m3 * u));
}

Trajectory resimulate(const std::vector<double>& releases, const ExogenousSeries& series, StepSpan span,
                      const InitialState& initial, const SystemParams& params, const HeadCurve& curve) {
    Trajectory traj;
    traj.initial = initial;
    double v = initial.v0;
    for (std::size_t k = 0; k < releases.size(); ++k) {
        const std::size_t t = span.begin + k;
        const HeadEval hd = head(curve, v);
        const double per_m3 = energy_per_m3(params, hd.meters);
        DispatchRecord rec;
        rec.t = t;
        rec.head_extrapolated = hd.extrapolated;
        rec.s = std::min(series.alpha[t] * params.solar_capacity, params.transmission);
        rec.u = releases[k];
        rec.h = std::min(params.transmission - rec.s, per_m3 * rec.u);
        rec.v = v + series.inflow[t] - rec.u;
        rec.theta_hat = series.lambda[t] * per_m3;
        rec.revenue = series.lambda[t] * (rec.h + rec.s);
        traj.push(rec);
        v = rec.v;
    }
    return traj;
}

// Total release over `steps` further steps when every step ramps as far as
// the bounds allow in one direction.
double chain_total(const SystemParams& params, double u, std::size_t steps, bool up) {
    double sum = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        u = up ? std::min(params.u_max, u + params.ramp_up) : std::max(params.u_min, u - params.ramp_down);
        sum += u;
    }
    return sum;
}

struct Node {
    double u;       // release of the last step
    double cum;     // exact cumulative release
    double value;   // revenue so far
    std::int64_t parent;
};

// Forward DP over the candidate tree. Candidates at each step are the release
// levels inside the ramp box plus the box end points, so ramp-limited chains
// are representable. Two paths reaching the same key are merged keeping the
// better value; since volume is v0 + inflow - cum, an exact (u, cum) key loses
// nothing, while a bucketed key trades exactness for a bounded state count.
template <typename KeyFn>
DpResult solve(const ExogenousSeries& series, const Contract& contract, const InitialState& initial,
               const SystemParams& params, const HeadCurve& curve, const std::vector<double>& levels,
               double tol, DpMode mode, double bucket_width, KeyFn key_of) {
    const std::size_t T = contract.span.size();
    const double U = contract.target_release;

    std::vector<StepEconomics> econ(T);
    double inflow_before = 0.0;
    std::vector<double> inflow_prefix(T + 1, 0.0);
    for (std::size_t k = 0; k < T; ++k) {
        const std::size_t t = contract.span.begin + k;
        const double s = std::min(series.alpha[t] * params.solar_capacity, params.transmission);
        econ[k] = {s, params.transmission - s, series.lambda[t]};
        inflow_before += series.inflow[t];
        inflow_prefix[k + 1] = inflow_before;
    }

    std::vector<std::vector<Node>> stages(T + 1);
    stages[0].push_back({initial.u0, 0.0, 0.0, -1});
    std::size_t visited = 0;
    std::vector<double> cand;

    for (std::size_t k = 0; k < T; ++k) {
        const std::size_t rest = T - k - 1;
        std::unordered_map<std::uint64_t, std::size_t> index;
        auto& next = stages[k + 1];
        for (std::size_t n = 0; n < stages[k].size(); ++n) {
            const Node node = stages[k][n];
            ++visited;
            const double v = initial.v0 + inflow_prefix[k] - node.cum;
            const double per_m3 = v >= 0.0 ? energy_per_m3(params, head(curve, v).meters) : 0.0;
            const ReleaseBox box = release_box(params, node.u);

            cand.clear();
            cand.push_back(box.lo);
            for (double lv : levels)
                if (lv > box.lo && lv < box.hi) cand.push_back(lv);
            if (box.hi > box.lo) cand.push_back(box.hi);

            for (double u : cand) {
                const double cum = node.cum + u;
                if (cum + chain_total(params, u, rest, false) > U + tol) break;  // cand is increasing
                if (cum + chain_total(params, u, rest, true) < U - tol) continue;
                const double value = node.value + step_revenue(econ[k], per_m3, u);
                const std::uint64_t key = key_of(u, cum);
                auto [it, inserted] = index.try_emplace(key, next.size());
                if (inserted)
                    next.push_back({u, cum, value, static_cast<std::int64_t>(n)});
                else if (value > next[it->second].value)
                    next[it->second] = {u, cum, value, static_cast<std::int64_t>(n)};
            }
        }
        if (next.empty()) throw Error(ErrorCode::OracleInfeasible, "no release sequence can meet the contract");
    }

    const auto& last = stages[T];
    std::int64_t best = -1;
    for (std::size_t n = 0; n < last.size(); ++n)
        if (std::abs(last[n].cum - U) <= tol && (best < 0 || last[n].value > last[best].value))
            best = static_cast<std::int64_t>(n);
    if (best < 0) throw Error(ErrorCode::OracleInfeasible, "no feasible terminal state meets the contract");

    std::vector<double> releases(T);
    for (std::size_t k = T; k-- > 0;) {
        const Node& node = stages[k + 1][static_cast<std::size_t>(best)];
        releases[k] = node.u;
        best = node.parent;
    }
    return {resimulate(releases, series, contract.span, initial, params, curve), mode, bucket_width, tol, visited};
}

std::uint64_t pack(std::int64_t a, std::int64_t b) {
    return (static_cast<std::uint64_t>(a) << 32) ^ static_cast<std::uint64_t>(b);
}

}  // namespace

DpResult dp_solve(const ExogenousSeries& series, const Contract& contract, const InitialState& initial,
                  const SystemParams& params, const HeadCurve& curve, const DPGrid& grid) {
    const std::size_t T = contract.span.size();
    if (T > kMaxOracleSteps) {
        std::ostringstream msg;
        msg << "oracle refuses horizons above " << kMaxOracleSteps << " steps (got " << T << ")";
        throw Error(ErrorCode::OracleRefused, msg.str());
    }
    if (grid.n_u < 2 || grid.n_c < 2) throw Error(ErrorCode::InvalidInput, "oracle grid counts must be at least 2");
    if (grid.n_u > 65535) throw Error(ErrorCode::InvalidInput, "oracle release grid is too fine");
    if (!(params.u_max > params.u_min)) throw Error(ErrorCode::InvalidInput, "oracle needs u_max > u_min");
    if (auto report = validate_inputs(params, series, contract, initial); !report.ok()) {
        std::ostringstream msg;
        for (const auto& v : report.violations) msg << v << "; ";
        throw Error(ErrorCode::InvalidInput, msg.str());
    }

    const std::size_t n_u = grid.n_u;
    const double du = (params.u_max - params.u_min) / static_cast<double>(n_u - 1);
    std::vector<double> levels(n_u);
    for (std::size_t j = 0; j < n_u; ++j)
        levels[j] = j + 1 == n_u ? params.u_max : params.u_min + du * static_cast<double>(j);

    const DpMode mode = grid.mode == DpMode::Auto ? (T <= 8 ? DpMode::Exact : DpMode::Bucketed) : grid.mode;
    if (mode == DpMode::Exact) {
        const double tol = grid.contract_tolerance > 0.0 ? grid.contract_tolerance : 0.5 * du;
        // Micro-m3 rounding only merges paths that differ by float noise.
        auto key = [](double u, double cum) {
            return std::hash<double>{}(std::round(u * 1e6)) * 0x9e3779b97f4a7c15ULL ^
                   static_cast<std::uint64_t>(std::llround(cum * 1e6));
        };
        return solve(series, contract, initial, params, curve, levels, tol, mode, du, key);
    }
    const double width = static_cast<double>(T) * params.u_max / static_cast<double>(grid.n_c - 1);
    const double tol = grid.contract_tolerance > 0.0 ? grid.contract_tolerance : width;
    auto key = [&](double u, double cum) {
        return pack(std::llround((u - params.u_min) / du), std::llround(cum / width));
    };
    return solve(series, contract, initial, params, curve, levels, tol, mode, width, key);
}

}  // namespace hydrofpv
