#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hydrofpv {

// Physical and operational constants of the plant. All rates are per one-hour
// step: releases and ramps in m3 per step, capacities in MWh per step.
struct SystemParams {
    static constexpr double j_per_mwh = 3.6e9;

    double eta = 0.775;        // generation efficiency
    double g = 9.8;            // m/s2
    double rho = 1000.0;       // kg/m3
    double u_min = 141.6;      // m3
    double u_max = 707.9;      // m3
    double ramp_up = 113.3;    // m3
    double ramp_down = 70.4;   // m3
    double transmission = 1300.0;  // P, MWh
    double solar_capacity = 1000.0;  // S, MWh

    // Empty when every invariant holds.
    std::vector<std::string> violations() const;
};

// Energy produced per m3 released at the given head (MWh/m3).
double energy_per_m3(const SystemParams& params, double head_m);

// Hydraulic head as a power law of reservoir volume: head = a * v^b.
class HeadCurve {
public:
    // Production curves: a > 0, 0 < b < 1, 0 < v_lo <= v_hi.
    static HeadCurve power_law(double a, double b, double v_lo, double v_hi);

    // Volume-independent head (b = 0). Only for verification against the
    // constant-head monotonicity result; validate_inputs rejects it.
    static HeadCurve constant(double head_m);

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double v_lo() const noexcept { return v_lo_; }
    double v_hi() const noexcept { return v_hi_; }
    bool is_constant() const noexcept { return b_ == 0.0; }

private:
    HeadCurve(double a, double b, double v_lo, double v_hi)
        : a_(a), b_(b), v_lo_(v_lo), v_hi_(v_hi) {}

    double a_;
    double b_;
    double v_lo_;
    double v_hi_;
};

struct HeadEval {
    double meters;
    bool extrapolated;  // v outside the fitted [v_lo, v_hi]
};

HeadEval head(const HeadCurve& curve, double volume_m3);

struct HeadPoint {
    double volume_m3;
    double head_m;
};

struct HeadFit {
    HeadCurve curve;
    double r_squared;  // in original (not log) space
    std::size_t n_points;
};

// Closed-form least squares of log(head) on log(volume).
HeadFit fit_head_curve(std::span<const HeadPoint> points);

// Upper bound on hydro energy (MWh) from releasing u m3 with the head set by
// the volume at the start of the step.
double max_hydro_energy(const SystemParams& params, const HeadCurve& curve, double v_prev, double u);

struct ExogenousSeries {
    std::vector<double> lambda;  // $/MWh
    std::vector<double> alpha;   // solar capacity factor
    std::vector<double> inflow;  // m3 per step

    std::size_t size() const noexcept { return lambda.size(); }
    std::vector<std::string> violations() const;
};

// Half-open step range [begin, end).
struct StepSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end > begin ? end - begin : 0; }
    bool empty() const noexcept { return end <= begin; }
    friend bool operator==(const StepSpan&, const StepSpan&) = default;
};

struct InitialState {
    double v0 = 0.0;  // m3
    double u0 = 0.0;  // release in the step before the horizon, m3
};

struct Contract {
    double target_release = 0.0;  // U, m3
    StepSpan span;
    std::string label;
};

struct DispatchRecord {
    std::size_t t = 0;
    double s = 0.0;          // solar, MWh
    double h = 0.0;          // hydro, MWh
    double u = 0.0;          // release, m3
    double v = 0.0;          // end-of-step volume, m3
    double theta_hat = 0.0;  // break-even water price, $/m3
    double revenue = 0.0;    // $
    bool head_extrapolated = false;
};

struct Trajectory {
    InitialState initial;
    std::vector<DispatchRecord> records;
    double total_revenue = 0.0;
    double total_release = 0.0;

    void push(const DispatchRecord& rec);
    // Terminal state, or the initial state for an empty trajectory.
    InitialState terminal() const;
    std::size_t extrapolated_steps() const;
};

// |v_T - (v0 + sum inflow - sum u)| relative to max(1, |v_T|), over the
// records' step indices.
double mass_balance_error(const Trajectory& traj, const ExogenousSeries& series);

struct FeasibilityReport {
    std::vector<std::string> violations;
    double lower_margin = 0.0;  // U - T*u_min
    double upper_margin = 0.0;  // T*u_max - U

    bool ok() const noexcept { return violations.empty(); }
};

FeasibilityReport validate_inputs(const SystemParams& params, const ExogenousSeries& series,
                                  const Contract& contract, const InitialState& initial);

// Also rejects non-production head curves.
FeasibilityReport validate_inputs(const SystemParams& params, const ExogenousSeries& series,
                                  const Contract& contract, const InitialState& initial,
                                  const HeadCurve& curve);

}  // namespace hydrofpv
