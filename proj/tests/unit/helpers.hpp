#pragma once

#include "bidcast/forecasters.hpp"
#include "bidcast/rng.hpp"
#include "bidcast/series.hpp"

#include <cmath>
#include <vector>

namespace testutil {

inline bidcast::HourlyCurveSet curves(double a, double b, double slope,
                                      std::int64_t hour = 0) {
    bidcast::HourlyCurveSet c;
    c.hour = hour;
    c.click = {a, b};
    c.cost = {slope};
    return c;
}

// Smoothly drifting competition curves; enough variation for value
// identification without any randomness.
inline std::vector<bidcast::HourlyCurveSet> drifting_curves(int n, double half_sat_base = 1.0,
                                                            double slope_base = 0.5) {
    std::vector<bidcast::HourlyCurveSet> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        const double hb = half_sat_base * (1.0 + 0.3 * std::sin(t / 5.0));
        const double sb = slope_base * (1.0 + 0.3 * std::cos(t / 7.0));
        out.push_back(curves(1.0, hb, sb, t));
    }
    return out;
}

// Plays an explicit-gradient learner with the given true parameters against
// the curve sequence; returns the aligned (bid, curves) series.
inline std::vector<bidcast::HourRecord> ogd_trajectory(
    const std::vector<bidcast::HourlyCurveSet>& cs, double value, double eta, double start_bid,
    double max_bid, double noise_sd = 0.0, std::uint64_t seed = 0) {
    bidcast::FittedRule rule;
    rule.kind = bidcast::RuleKind::OGD;
    rule.value = value;
    rule.eta = eta;
    rule.max_bid = max_bid;

    bidcast::Rng rng(seed);
    std::vector<bidcast::HourRecord> hours;
    hours.reserve(cs.size());
    double state = start_bid;
    for (std::size_t t = 0; t < cs.size(); ++t) {
        double played = state;
        if (noise_sd > 0.0) played *= rng.lognormal(noise_sd);
        hours.push_back({cs[t].hour, played, cs[t]});
        state = bidcast::ogd_step(rule, played, cs[t]);
    }
    return hours;
}

} // namespace testutil
