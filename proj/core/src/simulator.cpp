#include "bidcast/simulator.hpp"

#include "bidcast/errors.hpp"
#include "bidcast/rng.hpp"

#include <cmath>
#include <numbers>

namespace bidcast {

double br_optimum(double value, double half_sat, double slope) {
    if (slope <= 0.0) return std::numeric_limits<double>::infinity();
    return half_sat * (std::sqrt(1.0 + value / (slope * half_sat)) - 1.0);
}

double utility_curvature(double value, double saturation, double half_sat, double slope,
                         double bid) {
    const double d = half_sat + bid;
    return -2.0 * saturation * half_sat * (value + slope * half_sat) / (d * d * d);
}

std::vector<GroundTruthBidder> make_bidders(const MarketConfig& market,
                                            const PopulationConfig& pop) {
    std::vector<GroundTruthBidder> bidders;
    bidders.reserve(static_cast<std::size_t>(market.n_bidders));
    for (int i = 0; i < market.n_bidders; ++i) {
        Rng rng = Rng::substream(market.seed, 0x70000000ULL + static_cast<std::uint64_t>(i));
        GroundTruthBidder b;
        char id[16];
        std::snprintf(id, sizeof(id), "b%04d", i);
        b.bidder_id = id;
        b.rule = pop.rules[static_cast<std::size_t>(i) % pop.rules.size()];
        b.value = rng.uniform(pop.value.lo, pop.value.hi);
        b.beta = pop.beta;
        b.bid_noise_sd = pop.bid_noise_sd;
        b.base_saturation = rng.uniform(market.click_saturation.lo, market.click_saturation.hi);
        b.base_half_sat = rng.uniform(market.click_half_sat.lo, market.click_half_sat.hi);
        b.base_slope = rng.uniform(market.cost_slope.lo, market.cost_slope.hi);

        const double opt = br_optimum(b.value, b.base_half_sat, b.base_slope);
        const double curv = std::fabs(
            utility_curvature(b.value, b.base_saturation, b.base_half_sat, b.base_slope, opt));
        const ParamRange eta_range =
            b.rule == RuleKind::FTRL ? pop.ftrl_eta_rel : pop.eta_rel;
        const double eta_rel = rng.uniform(eta_range.lo, eta_range.hi);
        b.eta = curv > 0.0 ? eta_rel / curv : 0.0;
        b.initial_bid = opt * rng.uniform(pop.start_frac.lo, pop.start_frac.hi);
        b.won_top_slot = rng.uniform01() < pop.top_slot_fraction;
        if (b.rule == RuleKind::OGDBias)
            b.vis = VisibilityParams{b.value, pop.alpha, pop.vis0, pop.vis_sign};
        bidders.push_back(std::move(b));
    }
    return bidders;
}

double hour_scale_factor(const MarketConfig& config, std::int64_t hour) {
    const int hod = static_cast<int>(((hour % 24) + 24) % 24);
    double f = 1.0 + config.diurnal_amplitude *
                         std::sin(2.0 * std::numbers::pi * (hod - 6) / 24.0);
    if (config.shift == ShiftScenario::DayNight && hod >= 10 && hod <= 21)
        f *= 1.0 + config.day_uplift;
    return f;
}

namespace {

HourlyCurveSet mean_curve_at(const MarketConfig& config, const GroundTruthBidder& b,
                             std::int64_t hour) {
    HourlyCurveSet c;
    c.hour = hour;
    c.click.saturation = b.base_saturation;
    if (config.drift == CurveDrift::Proportional) {
        const double f = hour_scale_factor(config, hour);
        c.click.half_sat = b.base_half_sat * f;
        c.cost.slope = b.base_slope / f;
    } else {
        const int hod = static_cast<int>(((hour % 24) + 24) % 24);
        const double a = config.diurnal_amplitude;
        const double f_half = 1.0 + a * std::sin(2.0 * std::numbers::pi * hod / 24.0);
        const double f_slope =
            1.0 + a * std::sin(2.0 * std::numbers::pi * static_cast<double>(hour) / 17.0 + 1.0);
        double uplift = 1.0;
        if (config.shift == ShiftScenario::DayNight && hod >= 10 && hod <= 21)
            uplift = 1.0 + config.day_uplift;
        c.click.half_sat = b.base_half_sat * f_half * uplift;
        c.cost.slope = b.base_slope * f_slope / uplift;
    }
    return c;
}

FittedRule truth_rule(const GroundTruthBidder& b) {
    FittedRule r;
    r.kind = b.rule;
    r.value = b.value;
    r.eta = b.eta;
    r.beta = b.beta;
    if (b.vis) r.vis = *b.vis;
    // generous bound; production fits derive theirs from the train data
    r.max_bid = 64.0 * std::max(b.initial_bid, br_optimum(b.value, b.base_half_sat, b.base_slope));
    return r;
}

} // namespace

SimulationResult generate_market(const MarketConfig& config,
                                 std::span<const GroundTruthBidder> bidders, RowSink& sink) {
    SimulationResult result;
    result.bidders.reserve(bidders.size());

    for (std::size_t bi = 0; bi < bidders.size(); ++bi) {
        const GroundTruthBidder& b = bidders[bi];
        Rng rng = Rng::substream(config.seed, bi);
        const FittedRule rule = truth_rule(b);

        SimulatedBidder record;
        record.truth = b;
        record.hours.reserve(static_cast<std::size_t>(config.horizon_hours));

        std::vector<HourlyCurveSet> history; // for FTRL/FTL bidders
        double state = b.initial_bid;
        std::int64_t auction_id = 0;

        for (int t = 0; t < config.horizon_hours; ++t) {
            const auto hour = static_cast<std::int64_t>(t);
            const HourlyCurveSet mean_curve = mean_curve_at(config, b, hour);

            double played = state;
            if (b.bid_noise_sd > 0.0) played *= rng.lognormal(b.bid_noise_sd);

            const int n_auctions = rng.poisson(config.auctions_per_hour);
            for (int a = 0; a < n_auctions; ++a) {
                ClickCurve click = mean_curve.click;
                CostCurve cost = mean_curve.cost;
                if (config.jitter_sd > 0.0) {
                    click.saturation *= rng.lognormal(config.jitter_sd);
                    click.half_sat *= rng.lognormal(config.jitter_sd);
                    cost.slope *= rng.lognormal(config.jitter_sd);
                }
                for (double m : kBidMultipliers) {
                    RawRow row;
                    row.bidder_id = b.bidder_id;
                    row.hour = hour;
                    row.auction_id = auction_id;
                    row.multiplier = m;
                    row.bid = m * played;
                    row.click_prob = click.value(row.bid);
                    row.cpc = cost.value(row.bid);
                    sink.consume(row);
                    ++result.n_rows;
                }
                ++auction_id;
            }

            if (n_auctions > 0) {
                HourRecord rec;
                rec.hour = hour;
                rec.bid = played;
                rec.curves = mean_curve;
                rec.curves.n_auctions = n_auctions;
                record.hours.push_back(rec);
            }

            // advance the rule against the hour's mean curve
            switch (b.rule) {
                case RuleKind::BR:
                    state = br_bid(rule.value, mean_curve, rule.max_bid);
                    break;
                case RuleKind::MomentumBR:
                    state = momentum_br_step(rule, played, mean_curve);
                    break;
                case RuleKind::OGD:
                case RuleKind::OGDBias:
                    state = ogd_step(rule, played, mean_curve);
                    break;
                case RuleKind::BRReg:
                    state = brreg_step(rule, played, mean_curve);
                    break;
                case RuleKind::FTRL:
                case RuleKind::FTL:
                    history.push_back(mean_curve);
                    state = b.rule == RuleKind::FTRL ? ftrl_step(rule, history)
                                                     : ftl_step(rule, history);
                    break;
            }
        }
        result.bidders.push_back(std::move(record));
    }
    return result;
}

SimulationResult generate_market(const MarketConfig& config,
                                 std::span<const GroundTruthBidder> bidders,
                                 std::vector<RawRow>& rows) {
    VectorSink sink;
    SimulationResult result = generate_market(config, bidders, sink);
    rows = std::move(sink.rows);
    return result;
}

SimulationResult generate_shift_market(const MarketConfig& config,
                                       std::span<const GroundTruthBidder> bidders,
                                       RowSink& sink) {
    if (config.shift != ShiftScenario::DayNight)
        throw ConfigError("generate_shift_market: shift scenario must be DayNight");
    return generate_market(config, bidders, sink);
}

} // namespace bidcast
