#include "hydrofpv/io.hpp"

#include "hydrofpv/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hydrofpv::io {

namespace {

using namespace std::chrono;

[[noreturn]] void parse_error(const std::string& origin, std::size_t line, const std::string& what) {
    std::ostringstream msg;
    msg << origin;
    if (line > 0) msg << ":" << line;
    msg << ": " << what;
    throw Error(ErrorCode::Parse, msg.str());
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::optional<double> to_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double x = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(x)) return std::nullopt;
    return x;
}

std::optional<int> to_int(std::string_view s) {
    int x = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return x;
}

struct CsvLine {
    std::size_t number;
    std::vector<std::string_view> fields;
};

// Data lines of a two-column CSV after checking the header. Blank lines are skipped.
std::vector<CsvLine> csv_body(std::string_view text, std::string_view header, const std::string& origin) {
    std::vector<CsvLine> out;
    std::size_t line_no = 0;
    bool seen_header = false;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find('\n', start), text.size());
        const std::string_view line = trim(text.substr(start, end - start));
        ++line_no;
        start = end + 1;
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        if (!seen_header) {
            std::string normalized;
            for (auto f : split(line, ',')) {
                if (!normalized.empty()) normalized += ',';
                normalized += f;
            }
            if (normalized != header)
                parse_error(origin, line_no, "expected header '" + std::string(header) + "', got '" + std::string(line) + "'");
            seen_header = true;
            continue;
        }
        auto fields = split(line, ',');
        const std::size_t want = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
        if (fields.size() != want) {
            std::ostringstream msg;
            msg << "expected " << want << " fields, got " << fields.size();
            parse_error(origin, line_no, msg.str());
        }
        for (auto f : fields)
            if (f.empty()) parse_error(origin, line_no, "missing value");
        out.push_back({line_no, std::move(fields)});
        if (end == text.size()) break;
    }
    if (!seen_header) parse_error(origin, 0, "file is empty; expected header '" + std::string(header) + "'");
    return out;
}

double require_number(std::string_view field, const std::string& origin, std::size_t line) {
    auto x = to_double(field);
    if (!x) parse_error(origin, line, "not a finite number: '" + std::string(field) + "'");
    return *x;
}

std::vector<double> parse_list(std::string_view text, const std::string& what) {
    std::vector<double> out;
    for (auto f : split(text, ',')) {
        if (f.empty()) continue;
        auto x = to_double(f);
        if (!x) throw Error(ErrorCode::Parse, what + ": not a number: '" + std::string(f) + "'");
        out.push_back(*x);
    }
    return out;
}

std::string month_label(Hour h) {
    const year_month_day ymd{floor<days>(h)};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()));
    return buf;
}

}  // namespace

std::optional<Day> parse_day(std::string_view text) {
    text = trim(text);
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    auto y = to_int(text.substr(0, 4));
    auto m = to_int(text.substr(5, 2));
    auto d = to_int(text.substr(8, 2));
    if (!y || !m || !d) return std::nullopt;
    const year_month_day ymd{year{*y}, month{static_cast<unsigned>(*m)}, day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd};
}

std::optional<Hour> parse_hour(std::string_view text) {
    text = trim(text);
    if (text.size() < 16 || (text[10] != 'T' && text[10] != ' ') || text[13] != ':') return std::nullopt;
    auto d = parse_day(text.substr(0, 10));
    auto hh = to_int(text.substr(11, 2));
    auto mm = to_int(text.substr(14, 2));
    if (!d || !hh || !mm || *hh < 0 || *hh > 23 || *mm != 0) return std::nullopt;
    if (text.size() > 16) {
        if (text.size() != 19 || text[16] != ':' || to_int(text.substr(17, 2)) != 0) return std::nullopt;
    }
    return Hour{*d} + hours{*hh};
}

std::string format_day(Day d) {
    const year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string format_hour(Hour h) {
    const auto d = floor<days>(h);
    char buf[8];
    std::snprintf(buf, sizeof buf, "T%02d:00", static_cast<int>((h - d).count()));
    return format_day(d) + buf;
}

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

// ---- configuration ----------------------------------------------------------

IniSections parse_ini(std::string_view text, const std::string& origin) {
    IniSections out;
    std::string section;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto c = line.find_first_of("#;"); c != std::string_view::npos) line = line.substr(0, c);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') parse_error(origin, line_no, "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            out[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) parse_error(origin, line_no, "expected 'key = value'");
        if (section.empty()) parse_error(origin, line_no, "key outside any [section]");
        const std::string key{trim(line.substr(0, eq))};
        if (key.empty()) parse_error(origin, line_no, "empty key");
        auto& sec = out[section];
        if (sec.contains(key)) parse_error(origin, line_no, "duplicate key '" + key + "'");
        sec[key] = std::string(trim(line.substr(eq + 1)));
    }
    return out;
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir, const std::string& origin) {
    const IniSections ini = parse_ini(text, origin);
    RunConfig cfg;
    cfg.base_dir = base_dir;

    auto fail = [&](const std::string& section, const std::string& key, const std::string& what) {
        throw Error(ErrorCode::Parse, origin + ": [" + section + "] " + key + ": " + what);
    };
    auto num = [&](const std::string& section, const std::string& key, const std::string& value) {
        auto x = to_double(value);
        if (!x) fail(section, key, "not a finite number: '" + value + "'");
        return *x;
    };
    auto count = [&](const std::string& section, const std::string& key, const std::string& value) {
        const double x = num(section, key, value);
        if (x < 0 || x != std::floor(x) || x > 1e12) fail(section, key, "not a nonnegative integer");
        return static_cast<std::size_t>(x);
    };
    auto list = [&](const std::string& section, const std::string& key, const std::string& value) {
        try {
            return parse_list(value, origin + ": [" + section + "] " + key);
        } catch (const Error&) {
            fail(section, key, "not a comma-separated list of numbers");
        }
        return std::vector<double>{};
    };
    auto path = [&](const std::string& value) { return std::filesystem::path(value); };

    std::optional<double> v0, u0;
    for (const auto& [section, keys] : ini) {
        for (const auto& [key, value] : keys) {
            bool known = true;
            if (section == "data") {
                if (key == "price") cfg.price_csv = path(value);
                else if (key == "solar") cfg.solar_csv = path(value);
                else if (key == "inflow") cfg.inflow_csv = path(value);
                else if (key == "head") cfg.head_csv = path(value);
                else if (key == "contracts") cfg.contracts_csv = path(value);
                else known = false;
            } else if (section == "contracts") {
                if (key == "targets") cfg.contract_targets = list(section, key, value);
                else known = false;
            } else if (section == "head") {
                if (key == "a") cfg.head_a = num(section, key, value);
                else if (key == "b") cfg.head_b = num(section, key, value);
                else if (key == "v_lo") cfg.head_v_lo = num(section, key, value);
                else if (key == "v_hi") cfg.head_v_hi = num(section, key, value);
                else known = false;
            } else if (section == "system") {
                auto& p = cfg.params;
                if (key == "eta") p.eta = num(section, key, value);
                else if (key == "g") p.g = num(section, key, value);
                else if (key == "rho") p.rho = num(section, key, value);
                else if (key == "u_min") p.u_min = num(section, key, value);
                else if (key == "u_max") p.u_max = num(section, key, value);
                else if (key == "ramp_up") p.ramp_up = num(section, key, value);
                else if (key == "ramp_down") p.ramp_down = num(section, key, value);
                else if (key == "transmission") p.transmission = num(section, key, value);
                else if (key == "solar_capacity") p.solar_capacity = num(section, key, value);
                else known = false;
            } else if (section == "initial") {
                if (key == "v0") v0 = num(section, key, value);
                else if (key == "u0") u0 = num(section, key, value);
                else known = false;
            } else if (section == "bisection") {
                auto& b = cfg.bisection;
                if (key == "lo") b.lo = num(section, key, value);
                else if (key == "hi") b.hi = num(section, key, value);
                else if (key == "tolerance") b.tolerance = num(section, key, value);
                else if (key == "max_expansions") b.max_bracket_expansions = static_cast<int>(count(section, key, value));
                else known = false;
            } else if (section == "sweep") {
                if (key == "p_values") cfg.sweep_p_values = list(section, key, value);
                else known = false;
            } else if (section == "scenario") {
                auto& m = cfg.monte_carlo;
                if (key == "mape_levels") m.mape_levels = list(section, key, value);
                else if (key == "runs") m.n_runs = count(section, key, value);
                else if (key == "ar_coeff") m.ar_coeff = num(section, key, value);
                else if (key == "seed") m.base_seed = count(section, key, value);
                else if (key == "window") m.enforcement_window = count(section, key, value);
                else if (key == "workers") m.max_workers = static_cast<unsigned>(count(section, key, value));
                else known = false;
            } else if (section == "oracle") {
                auto& o = cfg.oracle;
                if (key == "steps") o.steps = count(section, key, value);
                else if (key == "start") o.start = count(section, key, value);
                else if (key == "target") o.target = num(section, key, value);
                else if (key == "n_u") o.grid.n_u = count(section, key, value);
                else if (key == "n_c") o.grid.n_c = count(section, key, value);
                else if (key == "contract_tolerance") o.grid.contract_tolerance = num(section, key, value);
                else if (key == "gap_tolerance") o.gap_tolerance = num(section, key, value);
                else if (key == "mode") {
                    if (value == "auto") o.grid.mode = DpMode::Auto;
                    else if (value == "exact") o.grid.mode = DpMode::Exact;
                    else if (value == "bucketed") o.grid.mode = DpMode::Bucketed;
                    else fail(section, key, "expected auto, exact or bucketed");
                } else known = false;
            } else if (section == "simulate") {
                if (key == "theta") cfg.simulate_thetas = list(section, key, value);
                else known = false;
            } else if (section == "output") {
                if (key == "dir") cfg.output_dir = path(value);
                else known = false;
            } else {
                throw Error(ErrorCode::Parse, origin + ": unknown section [" + section + "]");
            }
            if (!known) fail(section, key, "unknown key");
        }
    }
    if (v0 || u0) {
        if (!v0 || !u0) throw Error(ErrorCode::Parse, origin + ": [initial] needs both v0 and u0");
        cfg.initial = InitialState{*v0, *u0};
    }
    if (auto p = cfg.params.violations(); !p.empty()) throw Error(ErrorCode::InvalidInput, origin + ": [system] " + p.front());
    return cfg;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_text(path), path.parent_path(), path.string());
}

// ---- ingestion ---------------------------------------------------------------

HourlyColumn read_hourly_csv(std::string_view text, std::string_view value_header, const std::string& origin) {
    HourlyColumn col;
    const std::string header = "timestamp," + std::string(value_header);
    for (const auto& line : csv_body(text, header, origin)) {
        auto h = parse_hour(line.fields[0]);
        if (!h) parse_error(origin, line.number, "bad timestamp '" + std::string(line.fields[0]) + "'");
        if (!col.hours.empty()) {
            const Hour expected = col.hours.back() + hours{1};
            if (*h > expected)
                parse_error(origin, line.number,
                            "gap: missing hour " + format_hour(expected) + " (next timestamp is " + format_hour(*h) + ")");
            if (*h < expected)
                parse_error(origin, line.number, "timestamp " + format_hour(*h) + " is duplicated or out of order");
        }
        col.hours.push_back(*h);
        col.values.push_back(require_number(line.fields[1], origin, line.number));
    }
    if (col.hours.empty()) parse_error(origin, 0, "no data rows");
    return col;
}

DailyColumn read_daily_csv(std::string_view text, std::string_view value_header, const std::string& origin) {
    DailyColumn col;
    const std::string header = "date," + std::string(value_header);
    for (const auto& line : csv_body(text, header, origin)) {
        auto d = parse_day(line.fields[0]);
        if (!d) parse_error(origin, line.number, "bad date '" + std::string(line.fields[0]) + "'");
        if (!col.days.empty()) {
            const Day expected = col.days.back() + days{1};
            if (*d > expected)
                parse_error(origin, line.number,
                            "gap: missing day " + format_day(expected) + " (next date is " + format_day(*d) + ")");
            if (*d < expected) parse_error(origin, line.number, "date " + format_day(*d) + " is duplicated or out of order");
        }
        col.days.push_back(*d);
        const double v = require_number(line.fields[1], origin, line.number);
        if (v < 0.0) parse_error(origin, line.number, "inflow must be nonnegative");
        col.values.push_back(v);
    }
    if (col.days.empty()) parse_error(origin, 0, "no data rows");
    return col;
}

std::vector<HeadPoint> read_head_csv(std::string_view text, const std::string& origin) {
    std::vector<HeadPoint> pts;
    for (const auto& line : csv_body(text, "volume_m3,head_m", origin))
        pts.push_back({require_number(line.fields[0], origin, line.number),
                       require_number(line.fields[1], origin, line.number)});
    return pts;
}

std::vector<MonthlyTarget> read_contracts_csv(std::string_view text, const std::string& origin) {
    std::vector<MonthlyTarget> out;
    for (const auto& line : csv_body(text, "month,target_m3", origin)) {
        const std::string month{line.fields[0]};
        if (!parse_day(month + "-01")) parse_error(origin, line.number, "bad month '" + month + "', expected YYYY-MM");
        const double u = require_number(line.fields[1], origin, line.number);
        if (u < 0.0) parse_error(origin, line.number, "contract volume must be nonnegative");
        out.push_back({month, u});
    }
    return out;
}

AlignedSeries align(const HourlyColumn& price, const HourlyColumn& solar, const DailyColumn& inflow) {
    if (price.hours.front() != solar.hours.front())
        throw Error(ErrorCode::Parse, "solar series starts at " + format_hour(solar.hours.front()) +
                                          " but price series starts at " + format_hour(price.hours.front()));
    if (price.hours.size() != solar.hours.size()) {
        std::ostringstream msg;
        msg << "length mismatch: price has " << price.hours.size() << " hours, solar has " << solar.hours.size();
        throw Error(ErrorCode::Parse, msg.str());
    }

    AlignedSeries out;
    out.hours = price.hours;
    const std::size_t n = price.hours.size();
    out.series.lambda.resize(n);
    out.series.alpha.resize(n);
    out.series.inflow.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double lambda = price.values[t];
        const double alpha = solar.values[t];
        if (lambda < 0.0)
            throw Error(ErrorCode::Parse, "price at " + format_hour(price.hours[t]) + " is negative (unsupported)");
        if (alpha < 0.0 || alpha > 1.0)
            throw Error(ErrorCode::Parse, "capacity factor " + format_double(alpha) + " at " +
                                              format_hour(solar.hours[t]) + " is outside [0, 1]");
        const Day d = floor<days>(price.hours[t]);
        const auto offset = (d - inflow.days.front()).count();
        if (offset < 0 || static_cast<std::size_t>(offset) >= inflow.days.size())
            throw Error(ErrorCode::Parse, "inflow data does not cover " + format_day(d));
        out.series.lambda[t] = lambda;
        out.series.alpha[t] = alpha;
        out.series.inflow[t] = inflow.values[static_cast<std::size_t>(offset)] / 24.0;
    }
    return out;
}

namespace {

std::vector<std::pair<std::string, StepSpan>> month_spans(const std::vector<Hour>& hours) {
    std::vector<std::pair<std::string, StepSpan>> out;
    for (std::size_t t = 0; t < hours.size(); ++t) {
        const std::string label = month_label(hours[t]);
        if (out.empty() || out.back().first != label)
            out.push_back({label, {t, t + 1}});
        else
            out.back().second.end = t + 1;
    }
    return out;
}

}  // namespace

std::vector<Contract> month_contracts(const std::vector<Hour>& hours, const std::vector<MonthlyTarget>& targets) {
    const auto spans = month_spans(hours);
    if (spans.size() != targets.size()) {
        std::ostringstream msg;
        msg << "contracts must partition the horizon: data spans " << spans.size() << " months, got "
            << targets.size() << " contracts";
        throw Error(ErrorCode::Parse, msg.str());
    }
    std::vector<Contract> out;
    for (std::size_t m = 0; m < spans.size(); ++m) {
        if (spans[m].first != targets[m].month)
            throw Error(ErrorCode::Parse, "contract " + std::to_string(m) + " is for " + targets[m].month +
                                              " but the data month is " + spans[m].first);
        out.push_back({targets[m].target_m3, spans[m].second, spans[m].first});
    }
    return out;
}

std::vector<Contract> month_contracts(const std::vector<Hour>& hours, const std::vector<double>& targets) {
    const auto spans = month_spans(hours);
    std::vector<MonthlyTarget> labeled;
    for (std::size_t m = 0; m < targets.size(); ++m)
        labeled.push_back({m < spans.size() ? spans[m].first : std::string("?"), targets[m]});
    return month_contracts(hours, labeled);
}

std::pair<HeadCurve, std::optional<HeadFit>> load_head_curve(const RunConfig& cfg) {
    if (cfg.head_a || cfg.head_b) {
        if (!cfg.head_a || !cfg.head_b) throw Error(ErrorCode::Parse, "[head] needs both a and b");
        const double lo = cfg.head_v_lo.value_or(std::numeric_limits<double>::min());
        const double hi = cfg.head_v_hi.value_or(std::numeric_limits<double>::max());
        return {HeadCurve::power_law(*cfg.head_a, *cfg.head_b, lo, hi), std::nullopt};
    }
    if (cfg.head_csv.empty()) throw Error(ErrorCode::Parse, "config gives neither [head] a, b nor [data] head");
    const auto path = cfg.base_dir / cfg.head_csv;
    HeadFit fit = fit_head_curve(read_head_csv(read_text(path), path.string()));
    return {fit.curve, fit};
}

Ingested ingest(const RunConfig& cfg) {
    auto need = [](const std::filesystem::path& p, const char* key) {
        if (p.empty()) throw Error(ErrorCode::Parse, std::string("config is missing [data] ") + key);
    };
    need(cfg.price_csv, "price");
    need(cfg.solar_csv, "solar");
    need(cfg.inflow_csv, "inflow");
    if (!cfg.initial) throw Error(ErrorCode::Parse, "config is missing [initial] v0 and u0");

    const auto price_path = cfg.base_dir / cfg.price_csv;
    const auto solar_path = cfg.base_dir / cfg.solar_csv;
    const auto inflow_path = cfg.base_dir / cfg.inflow_csv;
    const auto price = read_hourly_csv(read_text(price_path), "usd_per_mwh", price_path.string());
    const auto solar = read_hourly_csv(read_text(solar_path), "capacity_factor", solar_path.string());
    const auto inflow = read_daily_csv(read_text(inflow_path), "m3_per_day", inflow_path.string());

    auto [curve, fit] = load_head_curve(cfg);
    Ingested out{align(price, solar, inflow), {}, curve, fit, *cfg.initial};

    if (!cfg.contracts_csv.empty()) {
        if (!cfg.contract_targets.empty())
            throw Error(ErrorCode::Parse, "give contracts either as a file or inline targets, not both");
        const auto path = cfg.base_dir / cfg.contracts_csv;
        out.contracts = month_contracts(out.data.hours, read_contracts_csv(read_text(path), path.string()));
    } else if (!cfg.contract_targets.empty()) {
        out.contracts = month_contracts(out.data.hours, cfg.contract_targets);
    } else {
        throw Error(ErrorCode::Parse, "config is missing contracts ([data] contracts or [contracts] targets)");
    }
    return out;
}

// ---- output --------------------------------------------------------------------

std::string trajectory_csv(const ExogenousSeries& series, const std::vector<Trajectory>& parts) {
    std::string out{kTrajectoryHeader};
    out += '\n';
    for (const auto& traj : parts) {
        for (const auto& r : traj.records) {
            out += std::to_string(r.t);
            for (double x : {series.lambda[r.t], series.alpha[r.t], series.inflow[r.t], r.s, r.h, r.u, r.v, r.revenue}) {
                out += ',';
                out += format_double(x);
            }
            out += '\n';
        }
    }
    return out;
}

std::vector<TrajectoryRow> parse_trajectory_csv(std::string_view text) {
    std::vector<TrajectoryRow> rows;
    for (const auto& line : csv_body(text, kTrajectoryHeader, "trajectory")) {
        TrajectoryRow r{};
        const double t = require_number(line.fields[0], "trajectory", line.number);
        r.t = static_cast<std::size_t>(t);
        double* dst[] = {&r.lambda, &r.alpha, &r.inflow, &r.s, &r.h, &r.u, &r.v, &r.revenue};
        for (std::size_t k = 0; k < 8; ++k) *dst[k] = require_number(line.fields[k + 1], "trajectory", line.number);
        rows.push_back(r);
    }
    return rows;
}

void write_files_atomic(const std::filesystem::path& dir, const std::map<std::string, std::string>& files) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create output directory " + dir.string() + ": " + ec.message());

    std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged;
    auto cleanup = [&] {
        for (auto& [tmp, _] : staged) std::filesystem::remove(tmp, ec);
    };
    for (const auto& [name, content] : files) {
        const auto final_path = dir / name;
        auto tmp = final_path;
        tmp += ".tmp";
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        staged.emplace_back(tmp, final_path);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.close();
        if (!out) {
            cleanup();
            throw Error(ErrorCode::Io, "cannot write " + tmp.string());
        }
    }
    for (auto& [tmp, final_path] : staged) {
        std::filesystem::rename(tmp, final_path, ec);
        if (ec) {
            cleanup();
            throw Error(ErrorCode::Io, "cannot rename into " + final_path.string() + ": " + ec.message());
        }
    }
}

}  // namespace hydrofpv::io
