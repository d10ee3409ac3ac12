#include "bidcast/regret.hpp"

#include "bidcast/errors.hpp"
#include "bidcast/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace bidcast {

double average_regret(std::span<const HourRecord> hours, double value,
                      std::span<const double> bid_grid) {
    if (hours.empty()) throw EmptySeries("average_regret: no hours");
    if (bid_grid.empty()) throw EmptySeries("average_regret: empty bid grid");

    const QuasiLinearParams params{value};
    const double t = static_cast<double>(hours.size());
    double realized = 0.0;
    for (const auto& h : hours) realized += quasilinear_utility(params, h.curves, h.bid);

    double best = -std::numeric_limits<double>::infinity();
    for (double g : bid_grid) {
        double s = 0.0;
        for (const auto& h : hours) s += quasilinear_utility(params, h.curves, g);
        best = std::max(best, s);
    }
    return (best - realized) / t;
}

std::vector<double> candidate_values(std::span<const HourRecord> hours,
                                     const EstimatorConfig& cfg) {
    const double avg = mean_bid(hours);
    if (avg <= 0.0) throw NonPositiveBids("candidate_values: average bid must be positive");
    const double lo = cfg.candidate_lo_frac * avg;
    const double hi = cfg.candidate_hi_frac * avg;
    const int n = std::max(cfg.n_candidates, 2);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    return out;
}

std::vector<double> deviation_bid_grid(std::span<const HourRecord> hours,
                                       const EstimatorConfig& cfg) {
    std::vector<double> grid;
    grid.reserve(hours.size() + static_cast<std::size_t>(cfg.n_deviation_bids));
    double max_bid = 0.0;
    for (const auto& h : hours) {
        grid.push_back(h.bid);
        max_bid = std::max(max_bid, h.bid);
    }
    const int n = std::max(cfg.n_deviation_bids, 2);
    const double hi = cfg.deviation_span_frac * max_bid;
    for (int i = 0; i < n; ++i)
        grid.push_back(hi * static_cast<double>(i) / (n - 1));
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

RegretProfile build_regret_profile(std::span<const HourRecord> hours,
                                   std::span<const double> candidates,
                                   std::vector<double> bid_grid) {
    if (hours.empty()) throw EmptySeries("build_regret_profile: no hours");

    // u_t(b; v) = v * x_t(b) - p_t(b) * x_t(b): accumulate the click and cost
    // components per grid bid once, then sweep the candidates.
    const std::size_t g_n = bid_grid.size();
    std::vector<double> sum_click(g_n, 0.0), sum_cost(g_n, 0.0);
    double realized_click = 0.0, realized_cost = 0.0;
    for (const auto& h : hours) {
        for (std::size_t i = 0; i < g_n; ++i) {
            const double x = h.curves.click.value(bid_grid[i]);
            sum_click[i] += x;
            sum_cost[i] += h.curves.cost.value(bid_grid[i]) * x;
        }
        const double xb = h.curves.click.value(h.bid);
        realized_click += xb;
        realized_cost += h.curves.cost.value(h.bid) * xb;
    }

    const double t = static_cast<double>(hours.size());
    RegretProfile profile;
    profile.bid_grid = std::move(bid_grid);
    profile.candidates.reserve(candidates.size());
    for (double v : candidates) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < g_n; ++i)
            best = std::max(best, v * sum_click[i] - sum_cost[i]);
        const double realized = v * realized_click - realized_cost;
        profile.candidates.emplace_back(v, (best - realized) / t);
    }
    std::sort(profile.candidates.begin(), profile.candidates.end());
    return profile;
}

double min_regret_value(const RegretProfile& profile) {
    if (profile.candidates.empty()) throw EmptySeries("min_regret_value: empty profile");
    double best_v = profile.candidates.front().first;
    double best_r = profile.candidates.front().second;
    for (const auto& [v, r] : profile.candidates) {
        if (r < best_r) { // strict: ties keep the smaller value
            best_r = r;
            best_v = v;
        }
    }
    return best_v;
}

double quantal_regret_value(const RegretProfile& profile, double lambda) {
    if (profile.candidates.empty()) throw EmptySeries("quantal_regret_value: empty profile");
    double min_r = std::numeric_limits<double>::infinity();
    for (const auto& [v, r] : profile.candidates) min_r = std::min(min_r, r);
    double num = 0.0, den = 0.0;
    for (const auto& [v, r] : profile.candidates) {
        const double w = std::exp(-lambda * (r - min_r));
        num += v * w;
        den += w;
    }
    return num / den;
}

double default_lambda(const RegretProfile& profile) {
    std::vector<double> abs_r;
    abs_r.reserve(profile.candidates.size());
    for (const auto& [v, r] : profile.candidates) abs_r.push_back(std::fabs(r));
    std::sort(abs_r.begin(), abs_r.end());
    if (abs_r.empty()) return 1.0;
    const std::size_t n = abs_r.size();
    const double med = (n % 2 == 1) ? abs_r[n / 2] : 0.5 * (abs_r[n / 2 - 1] + abs_r[n / 2]);
    return med > 0.0 ? 1.0 / med : 1.0;
}

ValueEstimates estimate_values(std::span<const HourRecord> hours, const EstimatorConfig& cfg) {
    ValueEstimates est;
    const auto candidates = candidate_values(hours, cfg);
    est.profile = build_regret_profile(hours, candidates, deviation_bid_grid(hours, cfg));
    est.lambda = cfg.lambda > 0.0 ? cfg.lambda : default_lambda(est.profile);
    est.quantal = quantal_regret_value(est.profile, est.lambda);
    est.min_regret = min_regret_value(est.profile);
    return est;
}

double shade_ratio(std::span<const HourRecord> hours, double value) {
    const double avg = mean_bid(hours);
    if (avg <= 0.0) throw NonPositiveBids("shade_ratio: mean bid must be positive");
    return value / avg;
}

double daily_value_cv(std::span<const HourRecord> hours, const EstimatorConfig& cfg,
                      int min_hours_per_day) {
    std::map<std::int64_t, std::vector<HourRecord>> days;
    for (const auto& h : hours) {
        const std::int64_t day = h.hour >= 0 ? h.hour / 24 : (h.hour - 23) / 24;
        days[day].push_back(h);
    }
    std::vector<double> daily;
    for (const auto& [day, recs] : days) {
        if (recs.size() < static_cast<std::size_t>(min_hours_per_day)) continue;
        const EstimatorConfig day_cfg = cfg;
        const auto candidates = candidate_values(recs, day_cfg);
        const auto profile =
            build_regret_profile(recs, candidates, deviation_bid_grid(recs, day_cfg));
        const double lambda = day_cfg.lambda > 0.0 ? day_cfg.lambda : default_lambda(profile);
        daily.push_back(quantal_regret_value(profile, lambda));
    }
    if (daily.size() < 2)
        throw InsufficientDays("daily_value_cv: need >= 2 days with enough active hours");
    const double m = stats::mean(daily);
    return stats::sample_stddev(daily) / m;
}

PlausibilityResult ogd_plausibility(std::span<const HourRecord> hours, double value) {
    if (hours.size() < 3)
        throw EmptySeries("ogd_plausibility: need at least 3 hours");

    const QuasiLinearParams params{value};
    std::vector<double> deltas, grads;
    deltas.reserve(hours.size() - 1);
    grads.reserve(hours.size() - 1);
    for (std::size_t t = 0; t + 1 < hours.size(); ++t) {
        deltas.push_back(hours[t + 1].bid - hours[t].bid);
        grads.push_back(quasilinear_grad(params, hours[t].curves, hours[t].bid));
    }

    const auto test = stats::pearson_test(deltas, grads); // throws ZeroVariance if constant
    PlausibilityResult out;
    out.correlation = test.r;
    const double sign = test.r >= 0.0 ? 1.0 : -1.0;
    const double neg_log_p =
        test.p_two_sided > 0.0 ? std::min(-std::log10(test.p_two_sided), 300.0) : 300.0;
    out.signed_neg_log10_p = sign * neg_log_p;

    double abs_delta = 0.0;
    for (double d : deltas) abs_delta += std::fabs(d);
    out.eligible = abs_delta / static_cast<double>(deltas.size()) >= 1.0;
    return out;
}

} // namespace bidcast
