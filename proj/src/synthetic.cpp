#include "hydrofpv/synthetic.hpp"

#include "hydrofpv/error.hpp"
#include "hydrofpv/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace hydrofpv::synthetic {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform in [0, 1).
double jitter(std::uint64_t key) {
    return static_cast<double>(splitmix64(key) >> 11) * 0x1.0p-53;
}

}  // namespace

ExogenousSeries make_series(std::size_t hours, std::size_t first_day, std::uint64_t salt) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    ExogenousSeries s;
    s.lambda.resize(hours);
    s.alpha.resize(hours);
    s.inflow.resize(hours);
    for (std::size_t t = 0; t < hours; ++t) {
        const double hod = static_cast<double>(t % 24);
        const std::size_t day = first_day + t / 24;
        const double d = static_cast<double>(day);

        const double evening_peak = std::max(0.0, std::sin(two_pi * (hod - 13.0) / 24.0));
        s.lambda[t] = 40.0 + 10.0 * std::sin(two_pi * (hod - 10.0) / 24.0) + 18.0 * evening_peak * evening_peak +
                      5.0 * std::sin(two_pi * d / 7.0) + 6.0 * jitter(salt * 0x10000 + t * 3 + 1);

        const double daylight = (hod > 6.0 && hod < 18.0) ? std::sin(std::numbers::pi * (hod - 6.0) / 12.0) : 0.0;
        const double clouds = 0.55 + 0.45 * jitter(salt * 0x10000 + day * 7 + 2);
        s.alpha[t] = std::clamp(daylight * clouds, 0.0, 1.0);

        const double daily = 24.0 * (380.0 + 60.0 * std::sin(two_pi * d / 30.0) + 40.0 * jitter(salt * 0x10000 + day * 11 + 3));
        s.inflow[t] = daily / 24.0;
    }
    return s;
}

HeadCurve reference_head_curve() {
    return HeadCurve::power_law(0.0557, 0.3342, 2.4e9, 3.3e10);
}

InitialState reference_initial_state() {
    return {1.5e10, 400.0};
}

AttainableTarget attainable_target(const ExogenousSeries& series, StepSpan span, const InitialState& initial,
                                   const SystemParams& params, const HeadCurve& curve, double quantile,
                                   double min_gap) {
    if (span.empty() || span.end > series.size()) throw Error(ErrorCode::InvalidInput, "bad span for target");
    const double per_m3 = energy_per_m3(params, head(curve, initial.v0).meters);
    std::vector<double> breakeven;
    breakeven.reserve(span.size());
    for (std::size_t t = span.begin; t < span.end; ++t) breakeven.push_back(series.lambda[t] * per_m3);
    std::sort(breakeven.begin(), breakeven.end());
    breakeven.erase(std::unique(breakeven.begin(), breakeven.end()), breakeven.end());
    if (breakeven.size() < 2) throw Error(ErrorCode::InvalidInput, "need at least two distinct prices");

    // Start at the quantile and walk outwards to the nearest pair of adjacent
    // prices at least min_gap apart, so the flat piece of sigma around
    // theta_ref is wide enough for a bisection to land on.
    const auto n = static_cast<std::ptrdiff_t>(breakeven.size() - 1);
    const auto q = static_cast<std::ptrdiff_t>(std::clamp(quantile, 0.0, 1.0) * static_cast<double>(n - 1));
    std::ptrdiff_t pick = -1;
    for (std::ptrdiff_t d = 0; d < n && pick < 0; ++d) {
        for (std::ptrdiff_t i : {q + d, q - d})
            if (i >= 0 && i < n && breakeven[i + 1] - breakeven[i] >= min_gap) {
                pick = i;
                break;
            }
    }
    if (pick < 0) throw Error(ErrorCode::InvalidInput, "no two break-even prices are far enough apart");
    const double theta_ref = 0.5 * (breakeven[pick] + breakeven[pick + 1]);
    const Trajectory traj = rollout(theta_ref, series, span, initial, params, curve);
    return {traj.total_release, theta_ref, traj.terminal()};
}

}  // namespace hydrofpv::synthetic
