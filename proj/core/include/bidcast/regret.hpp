#pragma once

#include "bidcast/series.hpp"
#include "bidcast/utility.hpp"

#include <span>
#include <utility>
#include <vector>

namespace bidcast {

// Knobs of the value estimator. Defaults follow the candidate-grid endpoints
// (1% to 6x the average bid) and leave the quantal temperature on autopilot
// (1 / median absolute regret over the candidate grid).
struct EstimatorConfig {
    int n_candidates = 120;
    double candidate_lo_frac = 0.01;
    double candidate_hi_frac = 6.0;
    int n_deviation_bids = 60;
    double deviation_span_frac = 2.0; // grid covers [0, span * max realized bid]
    double lambda = 0.0;              // 0 = auto
};

// Candidate values with their time-averaged regrets, sorted ascending by value.
struct RegretProfile {
    std::vector<std::pair<double, double>> candidates; // (value, regret)
    std::vector<double> bid_grid;
};

// Time-averaged regret against the best fixed bid from `bid_grid`:
//   max_g (1/T) sum_t [u_t(g; v) - u_t(b_t; v)]
// Throws EmptySeries when `hours` or `bid_grid` is empty.
double average_regret(std::span<const HourRecord> hours, double value,
                      std::span<const double> bid_grid);

// Evenly spaced candidate values over [lo_frac, hi_frac] * mean bid.
// Throws NonPositiveBids when the mean bid is not positive.
std::vector<double> candidate_values(std::span<const HourRecord> hours,
                                     const EstimatorConfig& cfg = {});

// Union of the realized bids and an even grid over [0, span * max bid]; the
// realized bids guarantee the regret is nonnegative.
std::vector<double> deviation_bid_grid(std::span<const HourRecord> hours,
                                       const EstimatorConfig& cfg = {});

// Regrets for every candidate. Utilities are linear in the value, so the
// per-bid sums over time are shared across candidates.
RegretProfile build_regret_profile(std::span<const HourRecord> hours,
                                   std::span<const double> candidates,
                                   std::vector<double> bid_grid);

// Argmin candidate; ties break toward the smaller value.
double min_regret_value(const RegretProfile& profile);

// Soft-min estimate sum v*exp(-lambda*R(v)) / sum exp(-lambda*R(v)),
// computed with the largest exponent factored out.
double quantal_regret_value(const RegretProfile& profile, double lambda);

// 1 / median |R(v)|; falls back to 1 when the median vanishes.
double default_lambda(const RegretProfile& profile);

struct ValueEstimates {
    double quantal = 0.0;
    double min_regret = 0.0;
    double lambda = 0.0;
    RegretProfile profile;
};

ValueEstimates estimate_values(std::span<const HourRecord> hours,
                               const EstimatorConfig& cfg = {});

// Estimated value over the mean realized bid.
double shade_ratio(std::span<const HourRecord> hours, double value);

// Coefficient of variation of per-day quantal values. Days with fewer than
// `min_hours_per_day` active hours are skipped; throws InsufficientDays when
// fewer than two days qualify.
double daily_value_cv(std::span<const HourRecord> hours, const EstimatorConfig& cfg = {},
                      int min_hours_per_day = 6);

struct PlausibilityResult {
    double signed_neg_log10_p = 0.0; // sign(r) * -log10(p), capped at +-300
    double correlation = 0.0;
    bool eligible = false; // mean |delta bid| >= 1 cent
};

// Correlation test between consecutive bid changes and the utility gradient
// at the given value; the update direction of a gradient learner.
PlausibilityResult ogd_plausibility(std::span<const HourRecord> hours, double value);

} // namespace bidcast
