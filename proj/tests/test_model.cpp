#include "hydrofpv/error.hpp"
#include "hydrofpv/model.hpp"
#include "hydrofpv/policy.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace hydrofpv;

TEST_CASE("head of a square-root curve") {
    const auto c = HeadCurve::power_law(2.0, 0.5, 1.0, 100.0);
    CHECK(head(c, 0.0).meters == 0.0);
    CHECK(head(c, 4.0).meters == doctest::Approx(4.0).epsilon(1e-15));
    CHECK_FALSE(head(c, 4.0).extrapolated);
    CHECK(head(c, 400.0).extrapolated);
    CHECK(head(c, 0.5).extrapolated);
    CHECK_THROWS_AS(head(c, -1.0), Error);
}

TEST_CASE("head curve rejects bad coefficients") {
    CHECK_THROWS_AS(HeadCurve::power_law(2.0, 1.0, 1.0, 10.0), Error);
    CHECK_THROWS_AS(HeadCurve::power_law(2.0, 0.0, 1.0, 10.0), Error);
    CHECK_THROWS_AS(HeadCurve::power_law(-1.0, 0.5, 1.0, 10.0), Error);
    CHECK(HeadCurve::constant(150.0).is_constant());
    CHECK(head(HeadCurve::constant(150.0), 1e12).meters == 150.0);
}

TEST_CASE("head is nondecreasing in volume") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> a(0.01, 5.0), b(0.05, 0.95), v(0.0, 1e11);
    for (int k = 0; k < 200; ++k) {
        const auto c = HeadCurve::power_law(a(rng), b(rng), 1.0, 1e11);
        double v1 = v(rng), v2 = v(rng);
        if (v1 > v2) std::swap(v1, v2);
        CHECK(head(c, v1).meters <= head(c, v2).meters);
    }
}

TEST_CASE("fit recovers an exact power law") {
    std::vector<HeadPoint> pts;
    for (double v : {1.0, 4.0, 9.0, 16.0, 25.0, 100.0}) pts.push_back({v, 2.0 * std::sqrt(v)});
    const HeadFit fit = fit_head_curve(pts);
    CHECK(std::abs(fit.curve.a() - 2.0) / 2.0 <= 1e-9);
    CHECK(std::abs(fit.curve.b() - 0.5) / 0.5 <= 1e-9);
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.curve.v_lo() == 1.0);
    CHECK(fit.curve.v_hi() == 100.0);

    pts.push_back(pts[2]);
    const HeadFit dup = fit_head_curve(pts);
    CHECK(std::abs(dup.curve.a() - 2.0) / 2.0 <= 1e-9);
    CHECK(std::abs(dup.curve.b() - 0.5) / 0.5 <= 1e-9);
}

TEST_CASE("fit recovery at reservoir scale") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> a(0.01, 1.0), b(0.1, 0.9), v(1e9, 4e10);
    for (int k = 0; k < 20; ++k) {
        const double A = a(rng), B = b(rng);
        std::vector<HeadPoint> pts;
        for (int i = 0; i < 12; ++i) {
            const double vol = v(rng);
            pts.push_back({vol, A * std::pow(vol, B)});
        }
        const HeadFit fit = fit_head_curve(pts);
        CHECK(std::abs(fit.curve.a() - A) / A <= 1e-9);
        CHECK(std::abs(fit.curve.b() - B) / B <= 1e-9);
    }
}

TEST_CASE("fit errors") {
    std::vector<HeadPoint> two{{1.0, 2.0}, {4.0, 4.0}};
    CHECK_THROWS_AS(fit_head_curve(two), Error);

    std::vector<HeadPoint> neg{{1.0, 2.0}, {4.0, 4.0}, {-9.0, 6.0}};
    try {
        fit_head_curve(neg);
        FAIL("expected a domain error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Domain);
    }

    std::vector<HeadPoint> same{{5.0, 2.0}, {5.0, 3.0}, {5.0, 4.0}};
    try {
        fit_head_curve(same);
        FAIL("expected a fit error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::FitFailure);
    }
}

TEST_CASE("max hydro energy") {
    const SystemParams p;
    const auto c = HeadCurve::constant(150.0);
    CHECK(max_hydro_energy(p, c, 1e10, 0.0) == 0.0);
    // 0.775 * 9.8 * 1000 * 150 * 707.9 = 806475075 J
    CHECK(max_hydro_energy(p, c, 1e10, 707.9) == doctest::Approx(806475075.0 / 3.6e9).epsilon(1e-14));
    CHECK(max_hydro_energy(p, c, 1e10, 707.9) == doctest::Approx(0.2240).epsilon(1e-4));
    CHECK(max_hydro_energy(p, c, 1e10, 600.0) == doctest::Approx(2.0 * max_hydro_energy(p, c, 1e10, 300.0)));

    const auto pl = HeadCurve::power_law(0.0557, 0.3342, 2.4e9, 3.3e10);
    CHECK(max_hydro_energy(p, pl, 1e10, 400.0) <= max_hydro_energy(p, pl, 2e10, 400.0));
}

TEST_CASE("system parameter invariants") {
    SystemParams p;
    CHECK(p.violations().empty());
    CHECK(SystemParams::j_per_mwh == 3.6e9);
    p.u_min = 800.0;
    CHECK_FALSE(p.violations().empty());
    p = SystemParams{};
    p.eta = 1.2;
    CHECK_FALSE(p.violations().empty());
    p = SystemParams{};
    p.ramp_down = 0.0;
    CHECK_FALSE(p.violations().empty());
}

TEST_CASE("validate_inputs contract bounds") {
    const SystemParams p;
    const InitialState init{1.5e10, 400.0};
    const auto s = testing::flat_series(730, 40.0, 0.3, 400.0);

    const auto ok = validate_inputs(p, s, {730 * 400.0, {0, 730}, "m"}, init);
    CHECK(ok.ok());
    CHECK(ok.lower_margin == doctest::Approx(730 * (400.0 - 141.6)));

    const auto lower = validate_inputs(p, s, {730 * p.u_min, {0, 730}, "m"}, init);
    CHECK(lower.ok());
    CHECK(lower.lower_margin == 0.0);

    const auto over = validate_inputs(p, s, {730 * p.u_max + 1.0, {0, 730}, "m"}, init);
    REQUIRE_FALSE(over.ok());
    bool named = false;
    for (const auto& v : over.violations) named |= v.find("contract exceeds maximum releasable volume") != std::string::npos;
    CHECK(named);

    CHECK_FALSE(validate_inputs(p, s, {1000.0, {0, 731}, "m"}, init).ok());
    CHECK_FALSE(validate_inputs(p, s, {1000.0, {5, 5}, "m"}, init).ok());
    CHECK_FALSE(validate_inputs(p, s, {730 * 400.0, {0, 730}, "m"}, {1.5e10, 900.0}).ok());

    auto bad = s;
    bad.alpha[3] = 1.5;
    CHECK_FALSE(validate_inputs(p, bad, {730 * 400.0, {0, 730}, "m"}, init).ok());
}

TEST_CASE("trajectory mass balance telescopes") {
    std::mt19937_64 rng(3);
    const SystemParams p;
    const auto c = HeadCurve::power_law(0.0557, 0.3342, 2.4e9, 3.3e10);
    for (int k = 0; k < 10; ++k) {
        const auto s = testing::random_series(300, rng);
        const Trajectory tr = rollout(std::uniform_real_distribution<double>(0.0, 0.03)(rng), s, {0, 300},
                                      {1.5e10, 400.0}, p, c);
        CHECK(mass_balance_error(tr, s) <= 1e-9);
        double sum = 0;
        for (const auto& r : tr.records) sum += r.u;
        CHECK(tr.total_release == doctest::Approx(sum).epsilon(1e-14));
    }
}
