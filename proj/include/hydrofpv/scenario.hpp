#pragma once

#include "hydrofpv/model.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace hydrofpv {

// Multiplicative AR(1) relative error applied to price, capacity factor and
// inflow: x'_t = clamp(x_t * (1 + e_t)), e_t = ar_coeff * e_{t-1} + w_t.
struct NoiseSpec {
    double mape_target = 0.0;  // fraction, e.g. 0.20
    double ar_coeff = 0.7;
    std::uint64_t seed = 0;
};

enum SeriesIndex : std::size_t { kPrice = 0, kSolar = 1, kInflow = 2 };

struct NoisySeries {
    ExogenousSeries series;
    std::array<double, 3> realized_mape{};    // price, solar, inflow
    std::array<double, 3> innovation_std{};   // calibrated w_t standard deviation
};

// Mean |x' - x| / x over entries with x > 0. Throws Scenario when no entry is
// positive.
double realized_mape(const std::vector<double>& base, const std::vector<double>& noisy);

// Deterministic in (series, spec). The innovation scale of each series is
// calibrated on its own draw so the realized MAPE hits the target.
NoisySeries gen_ar1(const ExogenousSeries& series, const NoiseSpec& spec);

struct MonteCarloConfig {
    std::vector<double> mape_levels{0.0, 0.05, 0.10, 0.15, 0.20};
    std::size_t n_runs = 200;
    std::uint64_t base_seed = 42;
    double ar_coeff = 0.7;
    // Steps at the end of each month in which the release is steered to keep
    // the contract reachable.
    std::size_t enforcement_window = 72;
    unsigned max_workers = 0;  // 0: hardware concurrency
};

struct MonteCarloRow {
    double mape_level = 0.0;
    std::size_t run = 0;
    std::uint64_t seed = 0;
    bool ok = true;
    std::string error;
    double revenue = 0.0;
    double release = 0.0;
    double residual = 0.0;            // sum over months of (release - U)
    double max_month_residual = 0.0;  // max over months of |release - U|
    std::size_t override_steps = 0;   // steps where the contract safeguard moved the release
    std::array<double, 3> realized_mape{};
};

struct MonteCarloSummary {
    double mape_level = 0.0;
    std::size_t runs = 0;
    std::size_t failed = 0;
    double revenue_mean = 0.0;
    double revenue_std = 0.0;
    double revenue_min = 0.0;
    double revenue_max = 0.0;
    double revenue_shift = 0.0;  // (mean - deterministic) / deterministic
    double release_mean = 0.0;
    double max_abs_residual = 0.0;
    std::array<double, 3> realized_mape_mean{};
};

struct MonteCarloReport {
    double deterministic_revenue = 0.0;
    double deterministic_release = 0.0;
    std::vector<MonteCarloRow> rows;  // level-major, then run
    std::vector<MonteCarloSummary> summary;
};

// Fixed-price monthly rollout on a (possibly perturbed) series with the end-of-
// month contract safeguard. In the last `window` steps of a month, a release
// that would make the contract unreachable under the ramp and release bounds
// is moved to the nearest release that keeps it reachable (maximal or minimal
// release when it is already out of reach).
struct EnforcedRollout {
    std::vector<Trajectory> months;
    std::size_t override_steps = 0;
};

EnforcedRollout rollout_with_contract(const std::vector<double>& thetas, const ExogenousSeries& series,
                                      const std::vector<Contract>& contracts, const InitialState& initial,
                                      const SystemParams& params, const HeadCurve& curve, std::size_t window);

// Statistics over the ok rows of one level.
MonteCarloSummary summarize(double mape_level, const std::vector<MonteCarloRow>& rows, double deterministic_revenue);

// Runs each (level, run) cell with seed base_seed + run. Cells are independent
// and may run concurrently; a failing run is recorded, not propagated.
MonteCarloReport monte_carlo(const ExogenousSeries& base, const std::vector<Contract>& contracts,
                             const InitialState& initial, const SystemParams& params, const HeadCurve& curve,
                             const std::vector<double>& theta_per_month, const MonteCarloConfig& cfg);

}  // namespace hydrofpv
