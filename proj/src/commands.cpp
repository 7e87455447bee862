#include "hydrofpv/commands.hpp"

#include "hydrofpv/io.hpp"
#include "hydrofpv/oracle.hpp"
#include "hydrofpv/policy.hpp"
#include "hydrofpv/pricer.hpp"
#include "hydrofpv/scenario.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <map>

namespace hydrofpv::cli {

using nlohmann::json;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::Parse:
        case ErrorCode::Io: return kConfig;
        case ErrorCode::Domain:
        case ErrorCode::FitFailure:
        case ErrorCode::InvalidInput: return kModel;
        case ErrorCode::UnsupportedInput:
        case ErrorCode::DegenerateHead: return kPolicy;
        case ErrorCode::InfeasibleContract:
        case ErrorCode::BracketFailure: return kPricer;
        case ErrorCode::OracleInfeasible:
        case ErrorCode::OracleRefused: return kOracle;
        case ErrorCode::Scenario: return kScenario;
    }
    return kInternal;
}

namespace {

using Files = std::map<std::string, std::string>;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

json fit_json(const HeadFit& fit) {
    return {{"a", fit.curve.a()},       {"b", fit.curve.b()},       {"r_squared", fit.r_squared},
            {"n_points", fit.n_points}, {"v_lo", fit.curve.v_lo()}, {"v_hi", fit.curve.v_hi()}};
}

json month_json(const Contract& c, const Trajectory& traj, double theta) {
    const double residual = traj.total_release - c.target_release;
    return {{"label", c.label},
            {"t_start", c.span.begin},
            {"t_end", c.span.end},
            {"target_m3", c.target_release},
            {"theta_star", theta},
            {"sigma_m3", traj.total_release},
            {"residual_m3", residual},
            {"relative_residual", c.target_release > 0 ? residual / c.target_release : 0.0},
            {"revenue_usd", traj.total_revenue},
            {"head_extrapolated_steps", traj.extrapolated_steps()}};
}

// Whole-horizon trajectory stitched from monthly parts, for mass-balance checks.
Trajectory stitch(const std::vector<Trajectory>& parts, const InitialState& initial) {
    Trajectory all;
    all.initial = initial;
    for (const auto& p : parts)
        for (const auto& r : p.records) all.push(r);
    return all;
}

std::filesystem::path out_dir(const CommandOptions& opts, const io::RunConfig& cfg) {
    if (opts.out_dir) return *opts.out_dir;
    if (!cfg.output_dir.empty()) return cfg.base_dir / cfg.output_dir;
    return "out";
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

Files cmd_fit_head(const io::RunConfig& cfg, std::ostream& log) {
    if (cfg.head_csv.empty()) throw Error(ErrorCode::Parse, "fit-head needs [data] head");
    const auto path = cfg.base_dir / cfg.head_csv;
    const auto start = Clock::now();
    const HeadFit fit = fit_head_curve(io::read_head_csv(io::read_text(path), path.string()));
    json j = {{"command", "fit-head"}, {"input", path.string()}, {"fit", fit_json(fit)}, {"wall_clock_ms", elapsed_ms(start)}};
    log << "head = " << fit.curve.a() << " * V^" << fit.curve.b() << "  (R^2 = " << fit.r_squared << ")\n";
    return {{"head_fit.json", dump(j)}};
}

json price_summary(const char* command, const io::Ingested& in, const std::vector<Trajectory>& months,
                   const std::vector<double>& thetas, const std::vector<ContractSolution>* sols) {
    json j;
    j["command"] = command;
    j["months"] = json::array();
    double revenue = 0, release = 0;
    for (std::size_t m = 0; m < months.size(); ++m) {
        json mj = month_json(in.contracts[m], months[m], thetas[m]);
        if (sols) {
            const auto& s = (*sols)[m];
            mj["iterations"] = s.iterations;
            mj["bracket_expansions"] = s.bracket_expansions;
            mj["monotone"] = s.monotone;
        }
        j["months"].push_back(mj);
        revenue += months[m].total_revenue;
        release += months[m].total_release;
    }
    j["total_revenue_usd"] = revenue;
    j["total_release_m3"] = release;
    j["mass_balance_error"] = mass_balance_error(stitch(months, in.initial), in.data.series);
    if (in.fit) j["head_fit"] = fit_json(*in.fit);
    return j;
}

Files cmd_price(const io::RunConfig& cfg, std::ostream& log) {
    const auto start = Clock::now();
    const io::Ingested in = io::ingest(cfg);
    const auto sols = solve_multi_month(in.data.series, in.contracts, in.initial, cfg.params, in.curve, cfg.bisection);
    std::vector<Trajectory> months;
    std::vector<double> thetas;
    for (const auto& s : sols) {
        months.push_back(s.trajectory);
        thetas.push_back(s.theta_star);
    }
    json j = price_summary("price", in, months, thetas, &sols);
    j["wall_clock_ms"] = elapsed_ms(start);
    for (const auto& mj : j["months"])
        log << mj["label"].get<std::string>() << ": theta* = " << mj["theta_star"].get<double>()
            << " $/m3, residual = " << mj["residual_m3"].get<double>() << " m3\n";
    return {{"trajectory.csv", io::trajectory_csv(in.data.series, months)}, {"summary.json", dump(j)}};
}

std::vector<double> simulate_thetas(const CommandOptions& opts, const io::RunConfig& cfg) {
    if (!opts.thetas.empty()) return opts.thetas;
    if (opts.summary) {
        json j;
        try {
            j = json::parse(io::read_text(*opts.summary));
            std::vector<double> out;
            for (const auto& m : j.at("months")) out.push_back(m.at("theta_star").get<double>());
            return out;
        } catch (const json::exception& e) {
            throw Error(ErrorCode::Parse, opts.summary->string() + ": " + e.what());
        }
    }
    if (!cfg.simulate_thetas.empty()) return cfg.simulate_thetas;
    throw Error(ErrorCode::Parse, "simulate needs water prices: --theta, --summary or [simulate] theta");
}

Files cmd_simulate(const io::RunConfig& cfg, const CommandOptions& opts, std::ostream& log) {
    const auto start = Clock::now();
    const io::Ingested in = io::ingest(cfg);
    const auto thetas = simulate_thetas(opts, cfg);
    for (double th : thetas)
        if (!(th >= 0.0)) throw Error(ErrorCode::Domain, "water prices must be nonnegative");
    const auto months = rollout_months(thetas, in.data.series, in.contracts, in.initial, cfg.params, in.curve);
    json j = price_summary("simulate", in, months, thetas, nullptr);
    j["wall_clock_ms"] = elapsed_ms(start);
    log << "simulated " << months.size() << " months, revenue " << j["total_revenue_usd"].get<double>() << " $\n";
    return {{"trajectory.csv", io::trajectory_csv(in.data.series, months)}, {"summary.json", dump(j)}};
}

Files cmd_sweep(const io::RunConfig& cfg, std::ostream& log) {
    const auto start = Clock::now();
    const io::Ingested in = io::ingest(cfg);
    const std::vector<double> p_values =
        cfg.sweep_p_values.empty() ? std::vector<double>{cfg.params.transmission} : cfg.sweep_p_values;
    for (double p : p_values)
        if (!(p >= 0.0)) throw Error(ErrorCode::InvalidInput, "transmission capacities must be nonnegative");
    const auto rows = sweep_capacity(in.data.series, in.contracts, in.initial, cfg.params, in.curve, cfg.bisection, p_values);

    std::string csv = "P_mwh,month,label,theta_star,revenue_usd,sigma_m3,residual_m3,feasible\n";
    std::map<double, double> revenue_by_p;
    for (const auto& r : rows) {
        csv += io::format_double(r.transmission) + ',' + std::to_string(r.month) + ',' + r.label + ',' +
               io::format_double(r.theta_star) + ',' + io::format_double(r.revenue) + ',' + io::format_double(r.sigma) +
               ',' + io::format_double(r.residual) + ',' + (r.feasible ? "1" : "0") + '\n';
        revenue_by_p[r.transmission] += r.revenue;
    }
    json j = {{"command", "sweep"}, {"p_values", p_values}, {"totals", json::array()}};
    for (double p : p_values) j["totals"].push_back({{"P_mwh", p}, {"revenue_usd", revenue_by_p[p]}});
    j["wall_clock_ms"] = elapsed_ms(start);
    log << "swept " << p_values.size() << " capacities x " << in.contracts.size() << " months\n";
    return {{"sweep.csv", csv}, {"summary.json", dump(j)}};
}

Files cmd_oracle_check(const io::RunConfig& cfg, std::ostream& log) {
    const auto start = Clock::now();
    const io::Ingested in = io::ingest(cfg);
    const auto& series = in.data.series;
    const auto& oc = cfg.oracle;
    if (oc.steps == 0) throw Error(ErrorCode::InvalidInput, "[oracle] steps must be positive");
    const StepSpan window{oc.start, oc.start + oc.steps};
    if (window.end > series.size()) throw Error(ErrorCode::InvalidInput, "[oracle] window extends past the data");

    const auto sols = solve_multi_month(series, in.contracts, in.initial, cfg.params, in.curve, cfg.bisection);
    std::size_t month = 0;
    while (!(in.contracts[month].span.begin <= window.begin && window.begin < in.contracts[month].span.end)) ++month;
    if (window.end > in.contracts[month].span.end) throw Error(ErrorCode::InvalidInput, "[oracle] window crosses a month boundary");

    InitialState state = in.initial;
    for (const auto& s : sols)
        for (const auto& r : s.trajectory.records)
            if (r.t + 1 == window.begin) state = {r.v, r.u};

    const double theta_month = sols[month].theta_star;
    const double target =
        oc.target ? *oc.target : rollout(theta_month, series, window, state, cfg.params, in.curve).total_release;
    const Contract contract{target, window, in.contracts[month].label};

    const ContractSolution policy = solve_contract_price(series, contract, state, cfg.params, in.curve, cfg.bisection);
    const DpResult dp = dp_solve(series, contract, state, cfg.params, in.curve, oc.grid);

    const double dp_rev = dp.trajectory.total_revenue;
    const double pol_rev = policy.trajectory.total_revenue;
    const double gap = dp_rev != 0.0 ? (dp_rev - pol_rev) / std::abs(dp_rev) : 0.0;
    const double dp_residual = dp.trajectory.total_release - target;

    json j = {{"command", "oracle-check"},
              {"window", {{"t_start", window.begin}, {"t_end", window.end}, {"month", contract.label}}},
              {"target_m3", target},
              {"policy",
               {{"theta_star", policy.theta_star},
                {"revenue_usd", pol_rev},
                {"release_m3", policy.sigma},
                {"residual_m3", policy.residual}}},
              {"oracle",
               {{"mode", dp.mode == DpMode::Exact ? "exact" : "bucketed"},
                {"revenue_usd", dp_rev},
                {"release_m3", dp.trajectory.total_release},
                {"residual_m3", dp_residual},
                {"bucket_width_m3", dp.bucket_width},
                {"contract_tolerance_m3", dp.contract_tolerance},
                {"states_visited", dp.states_visited}}},
              {"relative_gap", gap},
              {"gap_tolerance", oc.gap_tolerance},
              {"within_tolerance", gap <= oc.gap_tolerance},
              {"policy_release_within_bucket", std::abs(policy.residual) <= dp.bucket_width}};
    j["wall_clock_ms"] = elapsed_ms(start);
    log << "oracle gap " << gap * 100.0 << " % over " << oc.steps << " steps ("
        << (gap <= oc.gap_tolerance ? "within" : "OUTSIDE") << " tolerance)\n";
    return {{"oracle_check.json", dump(j)},
            {"oracle_policy.csv", io::trajectory_csv(series, {policy.trajectory})},
            {"oracle_dp.csv", io::trajectory_csv(series, {dp.trajectory})}};
}

Files cmd_monte_carlo(const io::RunConfig& cfg, const CommandOptions& opts, std::ostream& log) {
    const auto start = Clock::now();
    const io::Ingested in = io::ingest(cfg);
    MonteCarloConfig mc = cfg.monte_carlo;
    if (opts.seed) mc.base_seed = *opts.seed;

    const auto sols = solve_multi_month(in.data.series, in.contracts, in.initial, cfg.params, in.curve, cfg.bisection);
    std::vector<double> thetas;
    for (const auto& s : sols) thetas.push_back(s.theta_star);
    const MonteCarloReport rep = monte_carlo(in.data.series, in.contracts, in.initial, cfg.params, in.curve, thetas, mc);

    std::string csv =
        "mape_level,run,seed,ok,revenue_usd,release_m3,residual_m3,max_month_residual_m3,override_steps,"
        "mape_price,mape_solar,mape_inflow\n";
    for (const auto& r : rep.rows) {
        csv += io::format_double(r.mape_level) + ',' + std::to_string(r.run) + ',' + std::to_string(r.seed) + ',' +
               (r.ok ? "1" : "0") + ',' + io::format_double(r.revenue) + ',' + io::format_double(r.release) + ',' +
               io::format_double(r.residual) + ',' + io::format_double(r.max_month_residual) + ',' +
               std::to_string(r.override_steps) + ',' + io::format_double(r.realized_mape[0]) + ',' +
               io::format_double(r.realized_mape[1]) + ',' + io::format_double(r.realized_mape[2]) + '\n';
    }
    json levels = json::array();
    for (const auto& s : rep.summary) {
        levels.push_back({{"mape_level", s.mape_level},
                          {"runs", s.runs},
                          {"failed", s.failed},
                          {"revenue_mean_usd", s.revenue_mean},
                          {"revenue_std_usd", s.revenue_std},
                          {"revenue_min_usd", s.revenue_min},
                          {"revenue_max_usd", s.revenue_max},
                          {"revenue_shift", s.revenue_shift},
                          {"release_mean_m3", s.release_mean},
                          {"max_abs_month_residual_m3", s.max_abs_residual},
                          {"realized_mape", s.realized_mape_mean}});
        log << "MAPE " << s.mape_level * 100.0 << " %: mean revenue " << s.revenue_mean << " $ (shift "
            << s.revenue_shift * 100.0 << " %)\n";
    }
    json j = {{"command", "monte-carlo"},
              {"base_seed", mc.base_seed},
              {"runs_per_level", mc.n_runs},
              {"ar_coeff", mc.ar_coeff},
              {"enforcement_window", mc.enforcement_window},
              {"theta_per_month", thetas},
              {"deterministic_revenue_usd", rep.deterministic_revenue},
              {"deterministic_release_m3", rep.deterministic_release},
              {"levels", levels}};
    j["wall_clock_ms"] = elapsed_ms(start);
    return {{"mc_runs.csv", csv}, {"mc_summary.json", dump(j)}};
}

}  // namespace

int run(const std::string& verb, const CommandOptions& opts, std::ostream& log, std::ostream& err) {
    auto report = [&](const std::string& code, const std::string& message, int exit_code) {
        err << json{{"error", {{"command", verb}, {"code", code}, {"message", message}, {"exit_code", exit_code}}}}.dump()
            << "\n";
        return exit_code;
    };
    try {
        const io::RunConfig cfg = io::load_config(opts.config);
        Files files;
        if (verb == "fit-head") files = cmd_fit_head(cfg, log);
        else if (verb == "price") files = cmd_price(cfg, log);
        else if (verb == "simulate") files = cmd_simulate(cfg, opts, log);
        else if (verb == "sweep") files = cmd_sweep(cfg, log);
        else if (verb == "oracle-check") files = cmd_oracle_check(cfg, log);
        else if (verb == "monte-carlo") files = cmd_monte_carlo(cfg, opts, log);
        else return report("usage", "unknown command '" + verb + "'", kUsage);

        const auto dir = out_dir(opts, cfg);
        io::write_files_atomic(dir, files);
        for (const auto& [name, _] : files) log << "wrote " << (dir / name).string() << "\n";
        return kOk;
    } catch (const Error& e) {
        return report(std::string(to_string(e.code())), e.what(), exit_code_for(e.code()));
    } catch (const std::exception& e) {
        return report("internal", e.what(), kInternal);
    }
}

}  // namespace hydrofpv::cli
