#pragma once

#include "hydrofpv/model.hpp"

#include <vector>

namespace hydrofpv {

struct StepInput {
    double lambda = 0.0;  // $/MWh
    double alpha = 0.0;
    double inflow = 0.0;  // m3
    double v_prev = 0.0;  // m3
    double u_prev = 0.0;  // m3
};

// Feasible release interval for one step given the previous release.
struct ReleaseBox {
    double lo;
    double hi;
};

ReleaseBox release_box(const SystemParams& params, double u_prev);

// Closed-form solution of the single-step relaxed problem
//   max  lambda*(h + s) - theta*u
// subject to the step's mass balance, hydro, release, ramp, solar and
// transmission constraints. The head is taken at the start-of-step volume.
//
// Throws UnsupportedInput for a negative price and DegenerateHead when the
// head at v_prev is zero.
DispatchRecord dispatch_step(double theta, const StepInput& in, const SystemParams& params,
                             const HeadCurve& curve);

// Record for a release chosen outside the closed form (e.g. a contract
// override). u must lie in release_box(params, in.u_prev).
DispatchRecord dispatch_fixed_release(double u, const StepInput& in, const SystemParams& params,
                                      const HeadCurve& curve);

// Objective of the relaxed single-step problem at a given record.
inline double step_objective(double lambda, double theta, const DispatchRecord& rec) {
    return lambda * (rec.h + rec.s) - theta * rec.u;
}

// Runs dispatch_step over span in order, chaining volume and release.
Trajectory rollout(double theta, const ExogenousSeries& series, StepSpan span, const InitialState& initial,
                   const SystemParams& params, const HeadCurve& curve);

// Fixed-price rollout over consecutive months, one price per contract, each
// month starting from the previous month's terminal state. Returns one
// trajectory per contract.
std::vector<Trajectory> rollout_months(const std::vector<double>& thetas, const ExogenousSeries& series,
                                       const std::vector<Contract>& contracts, const InitialState& initial,
                                       const SystemParams& params, const HeadCurve& curve);

}  // namespace hydrofpv
