#include "hydrofpv/policy.hpp"

#include "hydrofpv/error.hpp"

#include <algorithm>
#include <sstream>

namespace hydrofpv {

ReleaseBox release_box(const SystemParams& params, double u_prev) {
    return {std::max(u_prev - params.ramp_down, params.u_min), std::min(u_prev + params.ramp_up, params.u_max)};
}

DispatchRecord dispatch_step(double theta, const StepInput& in, const SystemParams& params,
                             const HeadCurve& curve) {
    if (!(in.lambda >= 0.0))
        throw Error(ErrorCode::UnsupportedInput, "closed-form dispatch requires a nonnegative electricity price");
    if (!(theta >= 0.0)) throw Error(ErrorCode::Domain, "water price must be nonnegative");
    if (!(in.u_prev >= params.u_min && in.u_prev <= params.u_max))
        throw Error(ErrorCode::InvalidInput, "previous release outside [u_min, u_max]");

    const HeadEval hd = head(curve, in.v_prev);
    if (!(hd.meters > 0.0)) throw Error(ErrorCode::DegenerateHead, "hydraulic head is zero at the current volume");
    const double per_m3 = energy_per_m3(params, hd.meters);

    DispatchRecord rec;
    rec.head_extrapolated = hd.extrapolated;
    rec.s = std::min(in.alpha * params.solar_capacity, params.transmission);
    rec.theta_hat = in.lambda * per_m3;

    const double headroom = params.transmission - rec.s;
    // Strict inequality: at theta == theta_hat the release stays at the lower envelope.
    const double u_hat = rec.theta_hat > theta ? headroom / per_m3 : 0.0;
    rec.u = std::max({in.u_prev - params.ramp_down, params.u_min,
                      std::min({params.u_max, in.u_prev + params.ramp_up, u_hat})});
    rec.v = in.v_prev + in.inflow - rec.u;
    rec.h = std::min(headroom, per_m3 * rec.u);
    rec.revenue = in.lambda * (rec.h + rec.s);
    return rec;
}

DispatchRecord dispatch_fixed_release(double u, const StepInput& in, const SystemParams& params,
                                      const HeadCurve& curve) {
    const ReleaseBox box = release_box(params, in.u_prev);
    if (!(u >= box.lo && u <= box.hi)) throw Error(ErrorCode::InvalidInput, "release outside the feasible box");
    const HeadEval hd = head(curve, in.v_prev);
    const double per_m3 = energy_per_m3(params, hd.meters);

    DispatchRecord rec;
    rec.head_extrapolated = hd.extrapolated;
    rec.s = std::min(in.alpha * params.solar_capacity, params.transmission);
    rec.theta_hat = in.lambda * per_m3;
    rec.u = u;
    rec.v = in.v_prev + in.inflow - u;
    rec.h = std::min(params.transmission - rec.s, per_m3 * u);
    rec.revenue = in.lambda * (rec.h + rec.s);
    return rec;
}

Trajectory rollout(double theta, const ExogenousSeries& series, StepSpan span, const InitialState& initial,
                   const SystemParams& params, const HeadCurve& curve) {
    if (span.end > series.size() || span.end < span.begin) {
        std::ostringstream msg;
        msg << "rollout span [" << span.begin << ", " << span.end << ") outside series of length " << series.size();
        throw Error(ErrorCode::InvalidInput, msg.str());
    }
    Trajectory traj;
    traj.initial = initial;
    traj.records.reserve(span.size());

    StepInput in;
    in.v_prev = initial.v0;
    in.u_prev = initial.u0;
    for (std::size_t t = span.begin; t < span.end; ++t) {
        in.lambda = series.lambda[t];
        in.alpha = series.alpha[t];
        in.inflow = series.inflow[t];
        DispatchRecord rec = dispatch_step(theta, in, params, curve);
        rec.t = t;
        traj.push(rec);
        in.v_prev = rec.v;
        in.u_prev = rec.u;
    }
    return traj;
}

std::vector<Trajectory> rollout_months(const std::vector<double>& thetas, const ExogenousSeries& series,
                                       const std::vector<Contract>& contracts, const InitialState& initial,
                                       const SystemParams& params, const HeadCurve& curve) {
    if (thetas.size() != contracts.size()) {
        std::ostringstream msg;
        msg << "got " << thetas.size() << " water prices for " << contracts.size() << " contracts";
        throw Error(ErrorCode::InvalidInput, msg.str());
    }
    std::vector<Trajectory> out;
    out.reserve(contracts.size());
    InitialState state = initial;
    for (std::size_t m = 0; m < contracts.size(); ++m) {
        out.push_back(rollout(thetas[m], series, contracts[m].span, state, params, curve));
        state = out.back().terminal();
    }
    return out;
}

}  // namespace hydrofpv
