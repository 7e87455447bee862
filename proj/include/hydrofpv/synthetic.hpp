#pragma once

#include "hydrofpv/model.hpp"

#include <cstddef>
#include <cstdint>

namespace hydrofpv::synthetic {

// Deterministic hourly series built from closed-form daily and weekly cycles
// plus hash-based jitter, so every price is distinct with probability one.
// `first_day` offsets the calendar so different months differ.
ExogenousSeries make_series(std::size_t hours, std::size_t first_day = 0, std::uint64_t salt = 0);

// Power law close to a fit of an approximate large desert reservoir
// volume-head table (head ~140 m at 1.5e10 m3).
HeadCurve reference_head_curve();

// Mid-range volume and release used by the bundled fixture.
InitialState reference_initial_state();

// A contract volume the fixed-price policy attains exactly: the release at a
// water price halfway between two adjacent break-even prices near the given
// quantile of the span's break-even prices (evaluated at the initial head).
// Pairs closer than min_gap are skipped.
struct AttainableTarget {
    double target;          // m3
    double theta_ref;       // $/m3
    InitialState terminal;  // state after the span at theta_ref
};

AttainableTarget attainable_target(const ExogenousSeries& series, StepSpan span, const InitialState& initial,
                                   const SystemParams& params, const HeadCurve& curve, double quantile = 0.5,
                                   double min_gap = 1e-5);

}  // namespace hydrofpv::synthetic
