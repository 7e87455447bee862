#include "hydrofpv/scenario.hpp"

#include "hydrofpv/error.hpp"
#include "hydrofpv/parallel.hpp"
#include "hydrofpv/policy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace hydrofpv {

double realized_mape(const std::vector<double>& base, const std::vector<double>& noisy) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t t = 0; t < base.size(); ++t) {
        if (base[t] > 0.0) {
            sum += std::abs(noisy[t] - base[t]) / base[t];
            ++n;
        }
    }
    if (n == 0) throw Error(ErrorCode::Scenario, "MAPE is undefined for a series with no positive entry");
    return sum / static_cast<double>(n);
}

namespace {

struct Clamp {
    double lo;
    double hi;
};

constexpr std::array<Clamp, 3> kClamps{{
    {0.0, std::numeric_limits<double>::infinity()},  // price
    {0.0, 1.0},                                       // capacity factor
    {0.0, std::numeric_limits<double>::infinity()},  // inflow
}};

constexpr std::array<const char*, 3> kNames{"price", "solar", "inflow"};

void apply(const std::vector<double>& base, const std::vector<double>& unit_path, double scale, Clamp clamp,
           std::vector<double>& out) {
    out.resize(base.size());
    for (std::size_t t = 0; t < base.size(); ++t)
        out[t] = std::clamp(base[t] * (1.0 + scale * unit_path[t]), clamp.lo, clamp.hi);
}

// Unit-variance-innovation AR(1) path; the noise is linear in the innovation
// scale, so one path serves every scale tried during calibration.
std::vector<double> unit_ar1_path(std::size_t n, double ar_coeff, std::uint64_t seed, std::size_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> path(n);
    double e = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        e = ar_coeff * e + normal(rng);
        path[t] = e;
    }
    return path;
}

double calibrate_scale(const std::vector<double>& base, const std::vector<double>& unit_path, Clamp clamp,
                       double target, const char* name) {
    std::vector<double> work;
    auto mape_at = [&](double scale) {
        apply(base, unit_path, scale, clamp, work);
        return realized_mape(base, work);
    };

    double lo = 0.0;
    double hi = target;
    int doublings = 0;
    while (mape_at(hi) < target) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 60) {
            std::ostringstream msg;
            msg << "cannot reach MAPE " << target << " on the " << name << " series";
            throw Error(ErrorCode::Scenario, msg.str());
        }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double m = mape_at(mid);
        if (std::abs(m - target) <= 1e-9 * target) return mid;
        if (m < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

NoisySeries gen_ar1(const ExogenousSeries& series, const NoiseSpec& spec) {
    if (!(spec.mape_target >= 0.0) || !std::isfinite(spec.mape_target))
        throw Error(ErrorCode::Scenario, "MAPE target must be finite and nonnegative");
    if (!(spec.ar_coeff >= 0.0 && spec.ar_coeff < 1.0))
        throw Error(ErrorCode::Scenario, "AR(1) coefficient must lie in [0, 1)");

    NoisySeries out;
    out.series = series;
    if (spec.mape_target == 0.0) return out;

    const std::array<const std::vector<double>*, 3> bases{&series.lambda, &series.alpha, &series.inflow};
    const std::array<std::vector<double>*, 3> outs{&out.series.lambda, &out.series.alpha, &out.series.inflow};
    for (std::size_t k = 0; k < 3; ++k) {
        const auto path = unit_ar1_path(bases[k]->size(), spec.ar_coeff, spec.seed, k);
        const double scale = calibrate_scale(*bases[k], path, kClamps[k], spec.mape_target, kNames[k]);
        apply(*bases[k], path, scale, kClamps[k], *outs[k]);
        out.innovation_std[k] = scale;
        out.realized_mape[k] = realized_mape(*bases[k], *outs[k]);
    }
    return out;
}

namespace {

// Total release of `steps` further steps starting from release u when every
// step ramps as far up (or down) as the bounds allow.
double chain_total(const SystemParams& params, double u, std::size_t steps, bool up) {
    double sum = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        u = up ? std::min(params.u_max, u + params.ramp_up) : std::max(params.u_min, u - params.ramp_down);
        sum += u;
    }
    return sum;
}

}  // namespace

EnforcedRollout rollout_with_contract(const std::vector<double>& thetas, const ExogenousSeries& series,
                                      const std::vector<Contract>& contracts, const InitialState& initial,
                                      const SystemParams& params, const HeadCurve& curve, std::size_t window) {
    if (thetas.size() != contracts.size())
        throw Error(ErrorCode::InvalidInput, "need one water price per contract");

    EnforcedRollout out;
    InitialState state = initial;
    for (std::size_t m = 0; m < contracts.size(); ++m) {
        const Contract& c = contracts[m];
        if (c.span.end > series.size()) throw Error(ErrorCode::InvalidInput, "contract span outside series");
        const double U = c.target_release;
        const double slack = 1e-6 * std::max(1.0, U);
        const std::size_t window_start = c.span.end - std::min(window, c.span.size());

        Trajectory traj;
        traj.initial = state;
        StepInput in;
        in.v_prev = state.v0;
        in.u_prev = state.u0;
        double released = 0.0;
        for (std::size_t t = c.span.begin; t < c.span.end; ++t) {
            in.lambda = series.lambda[t];
            in.alpha = series.alpha[t];
            in.inflow = series.inflow[t];
            DispatchRecord rec = dispatch_step(thetas[m], in, params, curve);

            if (t >= window_start) {
                const std::size_t rest = c.span.end - t - 1;
                // Both bounds are nondecreasing in u.
                auto most = [&](double u) { return released + u + chain_total(params, u, rest, true); };
                auto least = [&](double u) { return released + u + chain_total(params, u, rest, false); };
                const ReleaseBox box = release_box(params, in.u_prev);

                double u = rec.u;
                if (most(u) < U - slack) {
                    double lo = u, hi = box.hi;
                    if (most(hi) < U - slack) {
                        u = hi;
                    } else {
                        for (int it = 0; it < 80; ++it) {
                            const double mid = 0.5 * (lo + hi);
                            (most(mid) < U - slack ? lo : hi) = mid;
                        }
                        u = hi;
                    }
                } else if (least(u) > U + slack) {
                    double lo = box.lo, hi = u;
                    if (least(lo) > U + slack) {
                        u = lo;
                    } else {
                        for (int it = 0; it < 80; ++it) {
                            const double mid = 0.5 * (lo + hi);
                            (least(mid) > U + slack ? hi : lo) = mid;
                        }
                        u = lo;
                    }
                }
                if (u != rec.u) {
                    rec = dispatch_fixed_release(u, in, params, curve);
                    ++out.override_steps;
                }
            }
            rec.t = t;
            traj.push(rec);
            released += rec.u;
            in.v_prev = rec.v;
            in.u_prev = rec.u;
        }
        state = traj.terminal();
        out.months.push_back(std::move(traj));
    }
    return out;
}

MonteCarloSummary summarize(double mape_level, const std::vector<MonteCarloRow>& rows, double deterministic_revenue) {
    MonteCarloSummary s;
    s.mape_level = mape_level;
    double sum = 0.0, rel = 0.0;
    s.revenue_min = std::numeric_limits<double>::infinity();
    s.revenue_max = -std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        if (r.mape_level != mape_level) continue;
        if (!r.ok) {
            ++s.failed;
            continue;
        }
        ++s.runs;
        sum += r.revenue;
        rel += r.release;
        s.revenue_min = std::min(s.revenue_min, r.revenue);
        s.revenue_max = std::max(s.revenue_max, r.revenue);
        s.max_abs_residual = std::max(s.max_abs_residual, r.max_month_residual);
        for (std::size_t k = 0; k < 3; ++k) s.realized_mape_mean[k] += r.realized_mape[k];
    }
    if (s.runs == 0) {
        s.revenue_min = s.revenue_max = 0.0;
        return s;
    }
    const double n = static_cast<double>(s.runs);
    s.revenue_mean = sum / n;
    double ss = 0.0;
    for (const auto& r : rows)
        if (r.mape_level == mape_level && r.ok) ss += (r.revenue - s.revenue_mean) * (r.revenue - s.revenue_mean);
    s.revenue_std = s.runs > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
    s.release_mean = rel / n;
    for (auto& m : s.realized_mape_mean) m /= n;
    s.revenue_shift =
        deterministic_revenue != 0.0 ? (s.revenue_mean - deterministic_revenue) / deterministic_revenue : 0.0;
    return s;
}

MonteCarloReport monte_carlo(const ExogenousSeries& base, const std::vector<Contract>& contracts,
                             const InitialState& initial, const SystemParams& params, const HeadCurve& curve,
                             const std::vector<double>& theta_per_month, const MonteCarloConfig& cfg) {
    if (cfg.mape_levels.empty()) throw Error(ErrorCode::Scenario, "no MAPE levels requested");
    if (theta_per_month.size() != contracts.size())
        throw Error(ErrorCode::Scenario, "need one deterministic water price per contract");

    MonteCarloReport report;
    for (const auto& month : rollout_months(theta_per_month, base, contracts, initial, params, curve)) {
        report.deterministic_revenue += month.total_revenue;
        report.deterministic_release += month.total_release;
    }

    const std::size_t n_cells = cfg.mape_levels.size() * cfg.n_runs;
    report.rows.resize(n_cells);
    parallel_for(
        n_cells,
        [&](std::size_t cell) {
            MonteCarloRow& row = report.rows[cell];
            row.mape_level = cfg.mape_levels[cell / cfg.n_runs];
            row.run = cell % cfg.n_runs;
            row.seed = cfg.base_seed + row.run;
            try {
                const NoisySeries noisy = gen_ar1(base, {row.mape_level, cfg.ar_coeff, row.seed});
                row.realized_mape = noisy.realized_mape;
                const EnforcedRollout ro = rollout_with_contract(theta_per_month, noisy.series, contracts, initial,
                                                                 params, curve, cfg.enforcement_window);
                row.override_steps = ro.override_steps;
                for (std::size_t m = 0; m < ro.months.size(); ++m) {
                    const double r = ro.months[m].total_release - contracts[m].target_release;
                    row.revenue += ro.months[m].total_revenue;
                    row.release += ro.months[m].total_release;
                    row.residual += r;
                    row.max_month_residual = std::max(row.max_month_residual, std::abs(r));
                }
            } catch (const std::exception& e) {
                row.ok = false;
                row.error = e.what();
            }
        },
        cfg.max_workers);

    for (double level : cfg.mape_levels) report.summary.push_back(summarize(level, report.rows, report.deterministic_revenue));
    return report;
}

}  // namespace hydrofpv
