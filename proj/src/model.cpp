#include "hydrofpv/model.hpp"

#include "hydrofpv/error.hpp"

#include <cmath>
#include <sstream>

namespace hydrofpv {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::Domain: return "domain";
        case ErrorCode::FitFailure: return "fit_failure";
        case ErrorCode::InvalidInput: return "invalid_input";
        case ErrorCode::UnsupportedInput: return "unsupported_input";
        case ErrorCode::DegenerateHead: return "degenerate_head";
        case ErrorCode::InfeasibleContract: return "infeasible_contract";
        case ErrorCode::BracketFailure: return "bracket_failure";
        case ErrorCode::OracleInfeasible: return "oracle_infeasible";
        case ErrorCode::OracleRefused: return "oracle_refused";
        case ErrorCode::Scenario: return "scenario";
        case ErrorCode::Parse: return "parse";
        case ErrorCode::Io: return "io";
    }
    return "unknown";
}

std::vector<std::string> SystemParams::violations() const {
    std::vector<std::string> out;
    auto check = [&out](bool ok, const char* what) {
        if (!ok) out.emplace_back(what);
    };
    check(std::isfinite(eta) && eta > 0.0 && eta <= 1.0, "eta must lie in (0, 1]");
    check(std::isfinite(g) && g > 0.0, "g must be positive");
    check(std::isfinite(rho) && rho > 0.0, "rho must be positive");
    check(std::isfinite(u_min) && u_min >= 0.0, "u_min must be nonnegative");
    check(std::isfinite(u_max) && u_max >= u_min, "u_max must be at least u_min");
    check(std::isfinite(ramp_up) && ramp_up > 0.0, "ramp_up must be positive");
    check(std::isfinite(ramp_down) && ramp_down > 0.0, "ramp_down must be positive");
    check(std::isfinite(transmission) && transmission >= 0.0, "transmission capacity must be nonnegative");
    check(std::isfinite(solar_capacity) && solar_capacity >= 0.0, "solar capacity must be nonnegative");
    return out;
}

double energy_per_m3(const SystemParams& params, double head_m) {
    return params.eta * params.g * params.rho * head_m / SystemParams::j_per_mwh;
}

HeadCurve HeadCurve::power_law(double a, double b, double v_lo, double v_hi) {
    if (!(std::isfinite(a) && a > 0.0))
        throw Error(ErrorCode::InvalidInput, "head curve scale a must be positive");
    if (!(std::isfinite(b) && b > 0.0 && b < 1.0))
        throw Error(ErrorCode::InvalidInput, "head curve exponent b must lie in (0, 1)");
    if (!(std::isfinite(v_lo) && std::isfinite(v_hi) && v_lo > 0.0 && v_lo <= v_hi))
        throw Error(ErrorCode::InvalidInput, "head curve volume range must satisfy 0 < v_lo <= v_hi");
    return HeadCurve(a, b, v_lo, v_hi);
}

HeadCurve HeadCurve::constant(double head_m) {
    if (!(std::isfinite(head_m) && head_m > 0.0))
        throw Error(ErrorCode::InvalidInput, "constant head must be positive");
    return HeadCurve(head_m, 0.0, 0.0, std::numeric_limits<double>::infinity());
}

HeadEval head(const HeadCurve& curve, double volume_m3) {
    if (!(volume_m3 >= 0.0))
        throw Error(ErrorCode::Domain, "head evaluated at negative volume");
    // pow(0, 0) is 1, which is the intended constant-head value.
    const double m = curve.a() * std::pow(volume_m3, curve.b());
    return {m, volume_m3 < curve.v_lo() || volume_m3 > curve.v_hi()};
}

HeadFit fit_head_curve(std::span<const HeadPoint> points) {
    if (points.size() < 3)
        throw Error(ErrorCode::FitFailure, "head fit needs at least 3 points");

    double sx = 0, sy = 0;
    double v_lo = points.front().volume_m3;
    double v_hi = v_lo;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        if (!(p.volume_m3 > 0.0) || !(p.head_m > 0.0) || !std::isfinite(p.volume_m3) || !std::isfinite(p.head_m)) {
            std::ostringstream msg;
            msg << "head fit point " << i << " is not strictly positive";
            throw Error(ErrorCode::Domain, msg.str());
        }
        sx += std::log(p.volume_m3);
        sy += std::log(p.head_m);
        v_lo = std::min(v_lo, p.volume_m3);
        v_hi = std::max(v_hi, p.volume_m3);
    }
    const double n = static_cast<double>(points.size());
    const double mx = sx / n;
    const double my = sy / n;

    double sxx = 0, sxy = 0;
    for (const auto& p : points) {
        const double dx = std::log(p.volume_m3) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(p.head_m) - my);
    }
    if (!(sxx > 0.0) || v_lo == v_hi)
        throw Error(ErrorCode::FitFailure, "head fit is degenerate: all volumes are equal");

    const double b = sxy / sxx;
    const double a = std::exp(my - b * mx);
    if (!(b > 0.0 && b < 1.0)) {
        std::ostringstream msg;
        msg << "fitted exponent b = " << b << " is outside (0, 1); data is not a concave power law";
        throw Error(ErrorCode::FitFailure, msg.str());
    }
    HeadCurve curve = HeadCurve::power_law(a, b, v_lo, v_hi);

    double mean_h = 0;
    for (const auto& p : points) mean_h += p.head_m;
    mean_h /= n;
    double ss_res = 0, ss_tot = 0;
    for (const auto& p : points) {
        const double r = p.head_m - head(curve, p.volume_m3).meters;
        ss_res += r * r;
        ss_tot += (p.head_m - mean_h) * (p.head_m - mean_h);
    }
    const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
    return {curve, r2, points.size()};
}

double max_hydro_energy(const SystemParams& params, const HeadCurve& curve, double v_prev, double u) {
    if (!(u >= 0.0)) throw Error(ErrorCode::Domain, "release must be nonnegative");
    return energy_per_m3(params, head(curve, v_prev).meters) * u;
}

std::vector<std::string> ExogenousSeries::violations() const {
    std::vector<std::string> out;
    if (alpha.size() != lambda.size() || inflow.size() != lambda.size()) {
        std::ostringstream msg;
        msg << "series lengths differ: price " << lambda.size() << ", solar " << alpha.size() << ", inflow "
            << inflow.size();
        out.push_back(msg.str());
        return out;
    }
    for (std::size_t t = 0; t < size(); ++t) {
        auto fail = [&](const char* what) {
            std::ostringstream msg;
            msg << what << " at step " << t;
            out.push_back(msg.str());
        };
        if (!(lambda[t] >= 0.0) || !std::isfinite(lambda[t])) fail("price must be finite and nonnegative");
        if (!(alpha[t] >= 0.0 && alpha[t] <= 1.0)) fail("capacity factor must lie in [0, 1]");
        if (!(inflow[t] >= 0.0) || !std::isfinite(inflow[t])) fail("inflow must be finite and nonnegative");
        if (out.size() >= 20) {
            out.emplace_back("further series violations suppressed");
            break;
        }
    }
    return out;
}

void Trajectory::push(const DispatchRecord& rec) {
    records.push_back(rec);
    total_revenue += rec.revenue;
    total_release += rec.u;
}

InitialState Trajectory::terminal() const {
    if (records.empty()) return initial;
    return {records.back().v, records.back().u};
}

std::size_t Trajectory::extrapolated_steps() const {
    std::size_t n = 0;
    for (const auto& r : records) n += r.head_extrapolated ? 1 : 0;
    return n;
}

double mass_balance_error(const Trajectory& traj, const ExogenousSeries& series) {
    if (traj.records.empty()) return 0.0;
    double in = 0, out = 0;
    for (const auto& r : traj.records) {
        in += series.inflow.at(r.t);
        out += r.u;
    }
    const double v_t = traj.records.back().v;
    const double expected = traj.initial.v0 + in - out;
    return std::abs(v_t - expected) / std::max(1.0, std::abs(v_t));
}

FeasibilityReport validate_inputs(const SystemParams& params, const ExogenousSeries& series,
                                  const Contract& contract, const InitialState& initial) {
    FeasibilityReport report;
    auto& v = report.violations;
    for (auto& m : params.violations()) v.push_back("params: " + m);
    for (auto& m : series.violations()) v.push_back("series: " + m);

    if (!(initial.v0 > 0.0)) v.emplace_back("initial: v0 must be positive");
    if (!(initial.u0 >= params.u_min && initial.u0 <= params.u_max))
        v.emplace_back("initial: u0 must lie within [u_min, u_max]");

    if (contract.span.empty()) v.emplace_back("contract: span is empty");
    if (contract.span.end > series.size()) v.emplace_back("contract: span extends past the series");
    if (!(contract.target_release >= 0.0)) v.emplace_back("contract: target release must be nonnegative");

    const double steps = static_cast<double>(contract.span.size());
    report.lower_margin = contract.target_release - steps * params.u_min;
    report.upper_margin = steps * params.u_max - contract.target_release;
    if (report.lower_margin < 0.0) v.emplace_back("contract is below the minimum releasable volume");
    if (report.upper_margin < 0.0) v.emplace_back("contract exceeds maximum releasable volume");
    return report;
}

FeasibilityReport validate_inputs(const SystemParams& params, const ExogenousSeries& series,
                                  const Contract& contract, const InitialState& initial,
                                  const HeadCurve& curve) {
    FeasibilityReport report = validate_inputs(params, series, contract, initial);
    if (!(curve.b() > 0.0 && curve.b() < 1.0))
        report.violations.emplace_back("head curve: exponent must lie in (0, 1)");
    return report;
}

}  // namespace hydrofpv
