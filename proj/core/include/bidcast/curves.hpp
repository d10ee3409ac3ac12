#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bidcast {

// One counterfactual sample: the click probability and cost-per-click the
// bidder would have seen at `bid`. Bids and cpc are in cents.
struct CurvePoint {
    double bid = 0.0;        // > 0
    double click_prob = 0.0; // >= 0
    double cpc = 0.0;        // >= 0
};

// Saturating click curve x(bid) = saturation * bid / (half_sat + bid).
// Increasing, concave, bounded by `saturation`; x(0) = 0.
struct ClickCurve {
    double saturation = 1.0; // supremum click rate, > 0
    double half_sat = 1.0;   // bid where x = saturation / 2, > 0

    double value(double bid) const noexcept {
        return saturation * bid / (half_sat + bid);
    }
    double grad(double bid) const noexcept {
        const double d = half_sat + bid;
        return saturation * half_sat / (d * d);
    }
};

// Linear cost-per-click curve p(bid) = slope * bid.
struct CostCurve {
    double slope = 0.0; // >= 0

    double value(double bid) const noexcept { return slope * bid; }
    double grad(double /*bid*/) const noexcept { return slope; }
};

// Fitted pair (click, cost) for one bidder-hour: the sufficient statistic of
// the competition the bidder faced during that hour.
struct HourlyCurveSet {
    std::int64_t hour = 0; // hours since epoch
    ClickCurve click;
    CostCurve cost;
    int n_auctions = 1;
};

// Least-squares fit of the saturating click curve by damped Gauss-Newton with
// multiple starts. Throws DegenerateFit when all click_prob are zero or the
// points do not span two distinct bids.
ClickCurve fit_click_curve(std::span<const CurvePoint> points);

// Least squares through the origin: slope = sum(bid*cpc) / sum(bid^2),
// clamped to >= 0. Throws DegenerateFit when sum(bid^2) == 0.
CostCurve fit_cost_curve(std::span<const CurvePoint> points);

} // namespace bidcast
