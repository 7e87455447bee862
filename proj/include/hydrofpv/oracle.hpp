#pragma once

#include "hydrofpv/model.hpp"
#include "hydrofpv/policy.hpp"

#include <cstddef>

namespace hydrofpv {

struct GridStepResult {
    double u_best;
    double objective;
};

// Brute-force maximizer of the single-step relaxed problem: n equally spaced
// releases over the feasible box, with solar and hydro set analytically for
// each candidate release.
GridStepResult grid_subproblem(double theta, const StepInput& in, const SystemParams& params,
                               const HeadCurve& curve, std::size_t n);

enum class DpMode {
    Auto,       // Exact for T <= 8, Bucketed above
    Exact,      // state = (last release, cumulative release), both exact
    Bucketed,   // state = (release level bucket, cumulative release bucket)
};

struct DPGrid {
    std::size_t n_u = 41;   // release levels spanning [u_min, u_max]
    std::size_t n_c = 201;  // cumulative-release buckets spanning [0, T*u_max] (bucketed mode)
    DpMode mode = DpMode::Auto;
    // Accepted |sum u - U| at the terminal stage. Zero selects the mode's
    // default: half the lattice spacing (exact) or one bucket width (bucketed).
    double contract_tolerance = 0.0;
};

struct DpResult {
    Trajectory trajectory;  // re-simulated at full precision
    DpMode mode;            // mode actually used
    double bucket_width;    // cumulative-release resolution, m3
    double contract_tolerance;
    std::size_t states_visited;
};

inline constexpr std::size_t kMaxOracleSteps = 48;

// Discretized multi-period revenue maximization with the contract enforced
// directly (no water price). Each step may pick any of the n_u levels inside
// the ramp box or either end of the box. Volume, and hence head, is a function
// of the cumulative release, so it is carried along exactly.
DpResult dp_solve(const ExogenousSeries& series, const Contract& contract, const InitialState& initial,
                  const SystemParams& params, const HeadCurve& curve, const DPGrid& grid = {});

}  // namespace hydrofpv
