#pragma once

#include "bidcast/curves.hpp"

namespace bidcast {

// Quasi-linear bidder: value-per-click minus expected payment.
struct QuasiLinearParams {
    double value = 0.0; // cents per click, > 0
};

// Quasi-linear bidder with an extra visibility term. `sign = +1` adds the
// term exactly as modeled (repelling the bid from the target visibility);
// `sign = -1` selects the attracting variant.
struct VisibilityParams {
    double value = 0.0;
    double alpha = 0.0; // bias strength, >= 0
    double vis0 = 0.0;  // target visibility in [0, 1]
    int sign = +1;      // {attract = -1, repel = +1}
};

// u(b) = (v - p(b)) * x(b). Concave in b for slope >= 0.
double quasilinear_utility(const QuasiLinearParams& params, const HourlyCurveSet& curves,
                           double bid) noexcept;

// du/db = v*x'(b) - slope*x(b) - slope*b*x'(b)
double quasilinear_grad(const QuasiLinearParams& params, const HourlyCurveSet& curves,
                        double bid) noexcept;

// vis(b) = x(b)/xmax = bid/(half_sat + bid); invariant to the click scale.
double visibility_level(const HourlyCurveSet& curves, double bid) noexcept;

// u(b) + sign * alpha/2 * (vis(b) - vis0)^2.
// alpha == 0 returns the quasi-linear utility bit-for-bit.
double visibility_utility(const VisibilityParams& params, const HourlyCurveSet& curves,
                          double bid) noexcept;

double visibility_grad(const VisibilityParams& params, const HourlyCurveSet& curves,
                       double bid) noexcept;

} // namespace bidcast
