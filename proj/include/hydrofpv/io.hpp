#pragma once

#include "hydrofpv/model.hpp"
#include "hydrofpv/oracle.hpp"
#include "hydrofpv/pricer.hpp"
#include "hydrofpv/scenario.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hydrofpv::io {

using Hour = std::chrono::sys_time<std::chrono::hours>;
using Day = std::chrono::sys_days;

// ISO-8601 local standard time, "YYYY-MM-DDTHH:MM[:SS]" (a space may replace
// the T). Minutes and seconds must be zero.
std::optional<Hour> parse_hour(std::string_view text);
std::optional<Day> parse_day(std::string_view text);
std::string format_hour(Hour h);
std::string format_day(Day d);

// Shortest text that parses back to exactly the same double.
std::string format_double(double x);

// ---- configuration ----------------------------------------------------------

// Flat "key = value" file with [section] headers; '#' and ';' start comments.
using IniSections = std::map<std::string, std::map<std::string, std::string>>;
IniSections parse_ini(std::string_view text, const std::string& origin);

struct OracleSettings {
    std::size_t steps = 6;
    std::size_t start = 0;
    std::optional<double> target;  // default: the policy's own release over the window
    DPGrid grid;
    double gap_tolerance = 0.02;
};

struct RunConfig {
    std::filesystem::path base_dir;  // relative paths resolve against this

    std::filesystem::path price_csv;
    std::filesystem::path solar_csv;
    std::filesystem::path inflow_csv;
    std::filesystem::path head_csv;       // fit input; optional when [head] a, b are given
    std::filesystem::path contracts_csv;  // month,target_m3; optional when targets are inline
    std::vector<double> contract_targets;

    std::optional<double> head_a;
    std::optional<double> head_b;
    std::optional<double> head_v_lo;
    std::optional<double> head_v_hi;

    SystemParams params;
    std::optional<InitialState> initial;
    BisectionConfig bisection;
    std::vector<double> sweep_p_values;
    MonteCarloConfig monte_carlo;
    OracleSettings oracle;
    std::vector<double> simulate_thetas;
    std::filesystem::path output_dir;  // empty unless set in the file
};

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir, const std::string& origin);
RunConfig load_config(const std::filesystem::path& path);

// ---- ingestion ---------------------------------------------------------------

struct HourlyColumn {
    std::vector<Hour> hours;
    std::vector<double> values;
};

// Strictly hourly, gap-free column with the given header.
HourlyColumn read_hourly_csv(std::string_view text, std::string_view value_header, const std::string& origin);

struct DailyColumn {
    std::vector<Day> days;
    std::vector<double> values;
};

DailyColumn read_daily_csv(std::string_view text, std::string_view value_header, const std::string& origin);

std::vector<HeadPoint> read_head_csv(std::string_view text, const std::string& origin);

struct MonthlyTarget {
    std::string month;  // YYYY-MM
    double target_m3;
};

std::vector<MonthlyTarget> read_contracts_csv(std::string_view text, const std::string& origin);

// Aligns price and solar by timestamp and spreads each day's inflow evenly
// over its 24 hours.
struct AlignedSeries {
    ExogenousSeries series;
    std::vector<Hour> hours;
};

AlignedSeries align(const HourlyColumn& price, const HourlyColumn& solar, const DailyColumn& inflow);

// One contract per calendar month touched by the horizon, in order.
std::vector<Contract> month_contracts(const std::vector<Hour>& hours, const std::vector<MonthlyTarget>& targets);
std::vector<Contract> month_contracts(const std::vector<Hour>& hours, const std::vector<double>& targets);

struct Ingested {
    AlignedSeries data;
    std::vector<Contract> contracts;
    HeadCurve curve;
    std::optional<HeadFit> fit;
    InitialState initial;
};

Ingested ingest(const RunConfig& cfg);

// Head curve from [head] coefficients or by fitting the head CSV.
std::pair<HeadCurve, std::optional<HeadFit>> load_head_curve(const RunConfig& cfg);

std::string read_text(const std::filesystem::path& path);

// ---- output --------------------------------------------------------------------

struct TrajectoryRow {
    std::size_t t;
    double lambda, alpha, inflow, s, h, u, v, revenue;
};

inline constexpr std::string_view kTrajectoryHeader = "t,lambda,alpha,inflow,s,h,u,v,revenue";

std::string trajectory_csv(const ExogenousSeries& series, const std::vector<Trajectory>& parts);
std::vector<TrajectoryRow> parse_trajectory_csv(std::string_view text);

// Writes every file to a temporary sibling first, then renames them all into
// place. Creates the directory if needed.
void write_files_atomic(const std::filesystem::path& dir, const std::map<std::string, std::string>& files);

}  // namespace hydrofpv::io
