#include "hydrofpv/error.hpp"
#include "hydrofpv/io.hpp"
#include "hydrofpv/policy.hpp"
#include "hydrofpv/synthetic.hpp"

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

using namespace hydrofpv;
namespace fs = std::filesystem;

namespace {

std::string hourly(const char* header, int days, double (*value)(int), int skip = -1) {
    std::ostringstream out;
    out << "timestamp," << header << "\n";
    for (int t = 0; t < 24 * days; ++t) {
        if (t == skip) continue;
        char ts[32];
        std::snprintf(ts, sizeof ts, "2022-03-%02dT%02d:00", 1 + t / 24, t % 24);
        out << ts << "," << io::format_double(value(t)) << "\n";
    }
    return out.str();
}

double price_of(int t) { return 30.0 + t; }
double solar_of(int t) { return t % 24 >= 8 && t % 24 <= 16 ? 0.5 : 0.0; }

std::string error_text(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("hydrofpv_io_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    void write(const std::string& name, const std::string& text) const { std::ofstream(path / name) << text; }
};

}  // namespace

TEST_CASE("time stamps") {
    const auto h = io::parse_hour("2022-01-31T23:00");
    REQUIRE(h);
    CHECK(io::format_hour(*h) == "2022-01-31T23:00");
    CHECK(io::format_hour(*h + std::chrono::hours(1)) == "2022-02-01T00:00");
    CHECK(io::parse_hour("2022-01-31 05:00:00"));
    CHECK_FALSE(io::parse_hour("2022-01-31T05:30"));
    CHECK_FALSE(io::parse_hour("2022-02-30T05:00"));
    CHECK_FALSE(io::parse_hour("2022-01-31T24:00"));
    CHECK(io::parse_day("2024-02-29"));
    CHECK_FALSE(io::parse_day("2023-02-29"));
}

TEST_CASE("doubles round-trip through text") {
    for (double x : {0.1, 1.0 / 3.0, 1.5e10 + 0.25, 340464.1000000006, -2.5e-300}) {
        CHECK(std::stod(io::format_double(x)) == x);
    }
}

TEST_CASE("two days of data") {
    const auto price = io::read_hourly_csv(hourly("usd_per_mwh", 2, price_of), "usd_per_mwh", "price.csv");
    const auto solar = io::read_hourly_csv(hourly("capacity_factor", 2, solar_of), "capacity_factor", "solar.csv");
    const auto inflow = io::read_daily_csv("date,m3_per_day\n2022-03-01,2400\n2022-03-02,4800\n", "m3_per_day", "in.csv");
    const auto al = io::align(price, solar, inflow);
    REQUIRE(al.series.size() == 48);
    for (int t = 0; t < 48; ++t) {
        CHECK(al.series.lambda[t] == price_of(t));
        CHECK(al.series.alpha[t] == solar_of(t));
        CHECK(al.series.inflow[t] == (t < 24 ? 100.0 : 200.0));
    }
}

TEST_CASE("gaps and bad values are rejected with locations") {
    const std::string gap = error_text([] {
        io::read_hourly_csv(hourly("usd_per_mwh", 2, price_of, 30), "usd_per_mwh", "price.csv");
    });
    CHECK(gap.find("2022-03-02T06:00") != std::string::npos);
    CHECK(gap.find("price.csv") != std::string::npos);

    const std::string missing = error_text([] {
        io::read_hourly_csv("timestamp,usd_per_mwh\n2022-03-01T00:00,4\n2022-03-01T01:00,\n", "usd_per_mwh", "p.csv");
    });
    CHECK(missing.find("p.csv:3") != std::string::npos);

    CHECK(error_text([] { io::read_hourly_csv("time,usd\n", "usd_per_mwh", "p.csv"); }).find("p.csv") !=
          std::string::npos);

    const auto price = io::read_hourly_csv(hourly("usd_per_mwh", 1, price_of), "usd_per_mwh", "price.csv");
    auto solar = io::read_hourly_csv(hourly("capacity_factor", 1, solar_of), "capacity_factor", "solar.csv");
    const auto inflow = io::read_daily_csv("date,m3_per_day\n2022-03-01,2400\n", "m3_per_day", "in.csv");
    solar.values[12] = 1.2;
    const std::string range = error_text([&] { io::align(price, solar, inflow); });
    CHECK(range.find("1.2") != std::string::npos);
    CHECK(range.find("2022-03-01T12:00") != std::string::npos);

    const auto short_solar = io::read_hourly_csv(hourly("capacity_factor", 1, solar_of, 23), "capacity_factor", "s.csv");
    CHECK_THROWS_AS(io::align(price, short_solar, inflow), Error);
}

TEST_CASE("head and contract tables") {
    const auto pts = io::read_head_csv("volume_m3,head_m\n1,2\n4,4\n9,6\n", "head.csv");
    REQUIRE(pts.size() == 3);
    CHECK(pts[2].volume_m3 == 9.0);
    const auto cs = io::read_contracts_csv("month,target_m3\n2022-01,1000\n2022-02,2000.5\n", "c.csv");
    REQUIRE(cs.size() == 2);
    CHECK(cs[1].month == "2022-02");
    CHECK(cs[1].target_m3 == 2000.5);
}

TEST_CASE("contracts follow calendar months") {
    std::vector<io::Hour> hours;
    auto h = *io::parse_hour("2022-01-31T22:00");
    for (int i = 0; i < 5; ++i) hours.push_back(h + std::chrono::hours(i));
    const auto cs = io::month_contracts(hours, std::vector<double>{10.0, 20.0});
    REQUIRE(cs.size() == 2);
    CHECK(cs[0].span == StepSpan{0, 2});
    CHECK(cs[1].span == StepSpan{2, 5});
    CHECK(cs[1].label == "2022-02");
    CHECK_THROWS_AS(io::month_contracts(hours, std::vector<double>{10.0}), Error);
}

TEST_CASE("config parsing") {
    const auto cfg = io::parse_config(
        "[data]\nprice = p.csv\nsolar = s.csv\ninflow = i.csv\n[head]\na = 0.05\nb = 0.33\n"
        "[contracts]\ntargets = 100, 200\n[system]\ntransmission = 900\n[initial]\nv0 = 1e10\nu0 = 300\n"
        "[bisection]\ntolerance = 1e-7\n[oracle]\nsteps = 8\nn_u = 21\n",
        "/tmp", "cfg");
    CHECK(cfg.params.transmission == 900.0);
    CHECK(cfg.params.u_max == 707.9);
    CHECK(cfg.contract_targets == std::vector<double>{100.0, 200.0});
    CHECK(cfg.bisection.tolerance == 1e-7);
    CHECK(cfg.oracle.steps == 8);
    CHECK(cfg.oracle.grid.n_u == 21);
    REQUIRE(cfg.initial);
    CHECK(cfg.initial->u0 == 300.0);

    CHECK_THROWS_AS(io::parse_config("[system]\nbogus = 1\n", "/tmp", "cfg"), Error);
    CHECK_THROWS_AS(io::parse_config("[nowhere]\nx = 1\n", "/tmp", "cfg"), Error);
    CHECK_THROWS_AS(io::parse_config("[system]\ntransmission = 1\ntransmission = 2\n", "/tmp", "cfg"), Error);
    CHECK_THROWS_AS(io::parse_config("[system]\ntransmission = abc\n", "/tmp", "cfg"), Error);
    CHECK_THROWS_AS(io::parse_config("[initial]\nv0 = 1\n", "/tmp", "cfg"), Error);
}

TEST_CASE("bundled fixture ingests") {
    const auto cfg = io::load_config(fs::path(HYDROFPV_FIXTURE_DIR) / "config.ini");
    const auto in = io::ingest(cfg);
    CHECK(in.data.series.size() == 1416);
    REQUIRE(in.contracts.size() == 2);
    CHECK(in.contracts[0].span == StepSpan{0, 744});
    CHECK(in.contracts[1].span == StepSpan{744, 1416});
    REQUIRE(in.fit);
    CHECK(in.fit->r_squared >= 0.99);
}

TEST_CASE("trajectory csv round trip") {
    const SystemParams p;
    const auto s = synthetic::make_series(100);
    const auto tr = rollout(0.013, s, {0, 100}, synthetic::reference_initial_state(), p,
                            synthetic::reference_head_curve());
    const std::string text = io::trajectory_csv(s, {tr});
    CHECK(text.rfind(std::string(io::kTrajectoryHeader) + "\n", 0) == 0);
    const auto rows = io::parse_trajectory_csv(text);
    REQUIRE(rows.size() == 100);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = tr.records[i];
        CHECK(rows[i].t == r.t);
        CHECK(std::memcmp(&rows[i].u, &r.u, sizeof(double)) == 0);
        CHECK(std::memcmp(&rows[i].v, &r.v, sizeof(double)) == 0);
        CHECK(std::memcmp(&rows[i].h, &r.h, sizeof(double)) == 0);
        CHECK(std::memcmp(&rows[i].s, &r.s, sizeof(double)) == 0);
        CHECK(std::memcmp(&rows[i].revenue, &r.revenue, sizeof(double)) == 0);
        CHECK(rows[i].lambda == s.lambda[i]);
    }
}

TEST_CASE("atomic writes") {
    TempDir dir;
    const auto out = dir.path / "nested" / "out";
    io::write_files_atomic(out, {{"a.txt", "alpha"}, {"b.txt", "beta"}});
    CHECK(io::read_text(out / "a.txt") == "alpha");
    CHECK(io::read_text(out / "b.txt") == "beta");
    std::size_t n = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(out)) ++n;
    CHECK(n == 2);
    CHECK_THROWS_AS(io::read_text(dir.path / "missing.txt"), Error);
}
