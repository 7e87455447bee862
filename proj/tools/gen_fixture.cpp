// Regenerates the bundled synthetic fixture (January-February 2022, hourly).
// Usage: gen_fixture <output-dir>

#include "hydrofpv/io.hpp"
#include "hydrofpv/synthetic.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>

namespace {

// Approximate volume-head pairs for a large desert reservoir (capacity from an
// area-capacity table, head = pool elevation minus tailwater). Rounded
// illustrative values, not an authoritative transcription.
constexpr struct { double volume_m3, head_m; } kHeadTable[] = {
    {2.46696e9, 76.2},   {4.81057e9, 92.964}, {7.03084e9, 108.204}, {8.75771e9, 120.396},
    {9.4978e9, 123.444}, {1.18414e10, 131.064}, {1.29515e10, 135.636}, {1.45551e10, 138.684},
    {2.03524e10, 153.924}, {2.70132e10, 169.164}, {3.21938e10, 178.0032},
};

}  // namespace

int main(int argc, char** argv) {
    using namespace hydrofpv;
    using namespace std::chrono;
    if (argc != 2) {
        std::cerr << "usage: gen_fixture <output-dir>\n";
        return 2;
    }

    const sys_days first_day{year{2022} / January / 1};
    const std::size_t n_days = 31 + 28;
    const ExogenousSeries series = synthetic::make_series(n_days * 24);

    std::string price = "timestamp,usd_per_mwh\n", solar = "timestamp,capacity_factor\n", inflow = "date,m3_per_day\n";
    std::vector<io::Hour> hours;
    for (std::size_t t = 0; t < series.size(); ++t) {
        const io::Hour h = io::Hour{first_day} + std::chrono::hours{t};
        hours.push_back(h);
        price += io::format_hour(h) + ',' + io::format_double(series.lambda[t]) + '\n';
        solar += io::format_hour(h) + ',' + io::format_double(series.alpha[t]) + '\n';
        if (t % 24 == 0) inflow += io::format_day(first_day + days{t / 24}) + ',' + io::format_double(series.inflow[t] * 24.0) + '\n';
    }

    std::string head_csv = "volume_m3,head_m\n";
    std::vector<HeadPoint> points;
    for (const auto& p : kHeadTable) {
        head_csv += io::format_double(p.volume_m3) + ',' + io::format_double(p.head_m) + '\n';
        points.push_back({p.volume_m3, p.head_m});
    }
    const HeadCurve curve = fit_head_curve(points).curve;

    // Contract volumes the policy meets exactly, chained month to month.
    const SystemParams params;
    const auto months = io::month_contracts(hours, std::vector<double>{0.0, 0.0});
    std::string contracts = "month,target_m3\n";
    InitialState state = synthetic::reference_initial_state();
    for (const auto& c : months) {
        const auto t = synthetic::attainable_target(series, c.span, state, params, curve, 0.5);
        contracts += c.label + ',' + io::format_double(t.target) + '\n';
        state = t.terminal;
    }

    const InitialState init = synthetic::reference_initial_state();
    std::string config =
        "# Synthetic two-month fixture. Prices, capacity factors and inflows are\n"
        "# deterministic formulas; the initial state is a made-up mid-range volume.\n"
        "[data]\n"
        "price = price.csv\n"
        "solar = solar.csv\n"
        "inflow = inflow.csv\n"
        "head = head_table.csv\n"
        "contracts = contracts.csv\n"
        "\n"
        "[initial]\n"
        "v0 = " + io::format_double(init.v0) + "\n"
        "u0 = " + io::format_double(init.u0) + "\n"
        "\n"
        "[sweep]\n"
        "p_values = 0, 500, 1000, 1300, 2000, 3000\n"
        "\n"
        "[scenario]\n"
        "mape_levels = 0, 0.05, 0.10, 0.15, 0.20\n"
        "runs = 200\n"
        "ar_coeff = 0.7\n"
        "seed = 42\n"
        "\n"
        "[oracle]\n"
        "steps = 6\n"
        "start = 10\n";

    io::write_files_atomic(argv[1], {{"price.csv", price},
                                     {"solar.csv", solar},
                                     {"inflow.csv", inflow},
                                     {"head_table.csv", head_csv},
                                     {"contracts.csv", contracts},
                                     {"config.ini", config}});
    return 0;
}
