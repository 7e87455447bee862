#include "hydrofpv/error.hpp"
#include "hydrofpv/oracle.hpp"
#include "hydrofpv/policy.hpp"
#include "hydrofpv/pricer.hpp"
#include "hydrofpv/synthetic.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <random>

using namespace hydrofpv;

namespace {

const HeadCurve kCurve = synthetic::reference_head_curve();
const InitialState kInit = synthetic::reference_initial_state();

// Plain depth-first enumeration of every release sequence drawn from the
// levels inside each step's ramp box plus the box end points.
double brute_force(const ExogenousSeries& s, const Contract& c, const InitialState& init, const SystemParams& p,
                   const HeadCurve& curve, std::size_t n_u, double tol) {
    std::vector<double> levels;
    const double du = (p.u_max - p.u_min) / static_cast<double>(n_u - 1);
    for (std::size_t j = 0; j < n_u; ++j) levels.push_back(j + 1 == n_u ? p.u_max : p.u_min + du * j);

    double best = -std::numeric_limits<double>::infinity();
    std::function<void(std::size_t, double, double, double, double)> go = [&](std::size_t k, double u_prev, double v,
                                                                               double cum, double rev) {
        if (k == c.span.size()) {
            if (std::abs(cum - c.target_release) <= tol) best = std::max(best, rev);
            return;
        }
        const ReleaseBox box = release_box(p, u_prev);
        std::vector<double> cand{box.lo};
        for (double l : levels)
            if (l > box.lo && l < box.hi) cand.push_back(l);
        if (box.hi > box.lo) cand.push_back(box.hi);
        const std::size_t t = c.span.begin + k;
        for (double u : cand) {
            const auto rec = dispatch_fixed_release(u, {s.lambda[t], s.alpha[t], s.inflow[t], v, u_prev}, p, curve);
            go(k + 1, u, rec.v, cum + u, rev + rec.revenue);
        }
    };
    go(0, init.u0, init.v0, 0.0, 0.0);
    return best;
}

}  // namespace

TEST_CASE("grid subproblem special cases") {
    const SystemParams p;
    const auto c = HeadCurve::constant(140.0);
    StepInput in{0.0, 0.3, 100.0, 1e10, 400.0};
    const auto pure_penalty = grid_subproblem(0.02, in, p, c, 1001);
    CHECK(pure_penalty.u_best == doctest::Approx(400.0 - 70.4));

    SystemParams narrow = p;
    narrow.transmission = 0.1;
    in = {40.0, 0.0, 0.0, 1e10, 400.0};
    const double u_hat = 0.1 / energy_per_m3(narrow, 140.0);
    const auto g = grid_subproblem(0.0, in, narrow, c, 100001);
    CHECK(g.u_best == doctest::Approx(std::min(400.0 + 113.3, std::max(329.6, u_hat))).epsilon(1e-3));
    CHECK(grid_subproblem(0.0, in, p, c, 1001).u_best == doctest::Approx(513.3));

    CHECK_THROWS_AS(grid_subproblem(0.0, in, p, c, 0), Error);
}

TEST_CASE("single step contract pins the release") {
    const SystemParams p;
    std::mt19937_64 rng(8);
    const auto s = testing::random_series(1, rng);
    const double U = kInit.u0 + p.ramp_up;  // top of the box
    DPGrid grid;
    grid.contract_tolerance = 1e-9;
    const auto dp = dp_solve(s, {U, {0, 1}, "x"}, kInit, p, kCurve, grid);
    REQUIRE(dp.trajectory.records.size() == 1);
    CHECK(dp.trajectory.records[0].u == U);
    const auto fixed = dispatch_fixed_release(U, {s.lambda[0], s.alpha[0], s.inflow[0], kInit.v0, kInit.u0}, p, kCurve);
    CHECK(dp.trajectory.total_revenue == fixed.revenue);
    CHECK(dp.mode == DpMode::Exact);
}

TEST_CASE("exact mode agrees with brute force") {
    const SystemParams p;
    std::mt19937_64 rng(77);
    for (int k = 0; k < 4; ++k) {
        const auto s = testing::random_series(4, rng);
        const double U = std::uniform_real_distribution<double>(1300.0, 2000.0)(rng);
        DPGrid grid;
        grid.n_u = 11;
        grid.mode = DpMode::Exact;
        grid.contract_tolerance = 30.0;
        const auto dp = dp_solve(s, {U, {0, 4}, "x"}, kInit, p, kCurve, grid);
        const double bf = brute_force(s, {U, {0, 4}, "x"}, kInit, p, kCurve, 11, 30.0);
        CHECK(dp.trajectory.total_revenue == doctest::Approx(bf).epsilon(1e-12));
        CHECK(std::abs(dp.trajectory.total_release - U) <= 30.0);
    }
}

TEST_CASE("finer nested grids never lose revenue") {
    const SystemParams p;
    std::mt19937_64 rng(78);
    for (int k = 0; k < 3; ++k) {
        const auto s = testing::random_series(6, rng);
        const auto tgt = synthetic::attainable_target(s, {0, 6}, kInit, p, kCurve);
        DPGrid coarse, fine;
        coarse.n_u = 21;
        fine.n_u = 41;
        coarse.contract_tolerance = fine.contract_tolerance = 10.0;
        const auto a = dp_solve(s, {tgt.target, {0, 6}, "x"}, kInit, p, kCurve, coarse);
        const auto b = dp_solve(s, {tgt.target, {0, 6}, "x"}, kInit, p, kCurve, fine);
        CHECK(b.trajectory.total_revenue >= a.trajectory.total_revenue - 1e-9);
    }
}

TEST_CASE("oracle bounds the decomposed policy") {
    const SystemParams p;
    std::mt19937_64 rng(79);
    std::uniform_real_distribution<double> q(0.1, 0.9), u0(200.0, 650.0);
    for (int k = 0; k < 8; ++k) {
        const auto s = synthetic::make_series(48, rng() % 300, rng() % 1000);
        const std::size_t b = rng() % 40;
        const InitialState init{kInit.v0, u0(rng)};
        const auto c = k % 2 ? HeadCurve::constant(140.0) : kCurve;
        const auto tgt = synthetic::attainable_target(s, {b, b + 6}, init, p, c, q(rng));
        const Contract contract{tgt.target, {b, b + 6}, "x"};
        const auto pol = solve_contract_price(s, contract, init, p, c);
        const auto dp = dp_solve(s, contract, init, p, c);
        const double gap = (dp.trajectory.total_revenue - pol.trajectory.total_revenue) / dp.trajectory.total_revenue;
        CHECK(gap >= -1e-12);
        CHECK(gap <= 0.02);
    }
}

TEST_CASE("bucketed mode keeps the contract within one bucket") {
    const SystemParams p;
    std::mt19937_64 rng(80);
    const auto s = testing::random_series(24, rng);
    const auto tgt = synthetic::attainable_target(s, {0, 24}, kInit, p, kCurve);
    const auto dp = dp_solve(s, {tgt.target, {0, 24}, "x"}, kInit, p, kCurve);
    CHECK(dp.mode == DpMode::Bucketed);
    CHECK(std::abs(dp.trajectory.total_release - tgt.target) <= dp.bucket_width);
    CHECK(mass_balance_error(dp.trajectory, s) <= 1e-9);
    double u_prev = kInit.u0;
    for (const auto& r : dp.trajectory.records) {
        CHECK(r.u >= p.u_min);
        CHECK(r.u <= p.u_max);
        CHECK(r.u - u_prev <= p.ramp_up + 1e-9);
        CHECK(u_prev - r.u <= p.ramp_down + 1e-9);
        CHECK(r.s + r.h <= p.transmission * (1 + 1e-12));
        u_prev = r.u;
    }
}

TEST_CASE("oracle refusals") {
    const SystemParams p;
    std::mt19937_64 rng(81);
    const auto s = testing::random_series(60, rng);
    try {
        dp_solve(s, {49 * 400.0, {0, 49}, "x"}, kInit, p, kCurve);
        FAIL("long horizon accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OracleRefused);
    }
    // Starting at full release, three steps cannot get down to 3 * u_min.
    try {
        dp_solve(s, {3 * p.u_min, {0, 3}, "x"}, {1.5e10, p.u_max}, p, kCurve);
        FAIL("unreachable contract accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OracleInfeasible);
    }
}
