#pragma once

#include "hydrofpv/model.hpp"
#include "hydrofpv/policy.hpp"

#include <cstddef>
#include <random>

namespace testing {

inline hydrofpv::ExogenousSeries flat_series(std::size_t n, double lambda, double alpha, double inflow) {
    hydrofpv::ExogenousSeries s;
    s.lambda.assign(n, lambda);
    s.alpha.assign(n, alpha);
    s.inflow.assign(n, inflow);
    return s;
}

// Random hourly series in the ranges used by the synthetic data.
inline hydrofpv::ExogenousSeries random_series(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> price(15.0, 90.0), cf(0.0, 1.0), inflow(200.0, 600.0);
    hydrofpv::ExogenousSeries s;
    for (std::size_t t = 0; t < n; ++t) {
        s.lambda.push_back(price(rng));
        s.alpha.push_back(t % 24 >= 7 && t % 24 <= 17 ? cf(rng) : 0.0);
        s.inflow.push_back(inflow(rng));
    }
    return s;
}

inline hydrofpv::StepInput random_step(std::mt19937_64& rng, const hydrofpv::SystemParams& p) {
    std::uniform_real_distribution<double> price(0.0, 120.0), cf(0.0, 1.0), inflow(0.0, 800.0),
        vol(2.4e9, 3.3e10), rel(p.u_min, p.u_max);
    hydrofpv::StepInput in;
    in.lambda = price(rng);
    in.alpha = cf(rng);
    in.inflow = inflow(rng);
    in.v_prev = vol(rng);
    in.u_prev = rel(rng);
    return in;
}

}  // namespace testing
