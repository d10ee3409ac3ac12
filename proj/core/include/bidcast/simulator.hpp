#pragma once

#include "bidcast/csv.hpp"
#include "bidcast/forecasters.hpp"
#include "bidcast/series.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bidcast {

// The twelve counterfactual multipliers recorded per auction.
inline constexpr std::array<double, 12> kBidMultipliers = {0.1, 0.2, 0.4, 0.6, 0.8, 1.0,
                                                           1.2, 1.4, 1.6, 1.8, 2.0, 5.0};

enum class ShiftScenario { None, DayNight };

// How the per-hour competition curves move. Proportional drift scales the
// click half-saturation up and the cost slope down by the same factor, which
// moves the best-reply level by exactly that factor. Independent drift gives
// the two parameters unrelated cycles, so the visibility level of a
// rule-following bidder sweeps a range instead of staying put.
enum class CurveDrift { Proportional, Independent };

struct ParamRange {
    double lo = 0.0;
    double hi = 0.0;
};

struct MarketConfig {
    int n_bidders = 20;
    int horizon_hours = 240;
    double auctions_per_hour = 5.0; // Poisson mean
    ParamRange click_saturation{0.4, 1.6};
    ParamRange click_half_sat{60.0, 180.0}; // cents
    ParamRange cost_slope{0.3, 0.8};
    double diurnal_amplitude = 0.1; // sinusoidal day/night modulation of half_sat and slope
    CurveDrift drift = CurveDrift::Proportional;
    double jitter_sd = 0.05;        // per-auction lognormal jitter on curve parameters
    ShiftScenario shift = ShiftScenario::None;
    double day_uplift = 0.2; // extra daytime scaling of the best-reply level (DayNight only)
    std::uint64_t seed = 0;
};

// Resolved ground truth for one simulated bidder.
struct GroundTruthBidder {
    std::string bidder_id;
    double value = 0.0;
    RuleKind rule = RuleKind::OGD;
    double eta = 0.0;
    double beta = 0.9;
    std::optional<VisibilityParams> vis; // OGDBias bidders
    double bid_noise_sd = 0.0;           // multiplicative lognormal noise on the played bid
    // base competition curve and start state
    double base_saturation = 1.0;
    double base_half_sat = 100.0;
    double base_slope = 0.5;
    double initial_bid = 0.0;
    bool won_top_slot = true;
};

// Population sampler: cycles rules over the list and draws everything else
// from the given ranges, resolving eta from the curvature of the base curve
// so that `eta_rel` is the per-step contraction toward the best reply.
struct PopulationConfig {
    std::vector<RuleKind> rules = {RuleKind::OGD};
    ParamRange value{150.0, 600.0}; // cents per click
    ParamRange eta_rel{0.1, 0.3};
    // FTRL regularizer strength, in units of 1/curvature. Small values shrink
    // the leader's bid toward zero; a few units keep the bias within a few
    // percent so the bidder stays close to no-regret play.
    ParamRange ftrl_eta_rel{2.0, 6.0};
    double beta = 0.9;
    double bid_noise_sd = 0.01;
    ParamRange start_frac{0.5, 0.9}; // initial bid as a fraction of the base best reply
    double top_slot_fraction = 1.0;
    double alpha = 0.0; // OGDBias ground truth
    double vis0 = 0.5;
    int vis_sign = +1;
};

std::vector<GroundTruthBidder> make_bidders(const MarketConfig& market,
                                            const PopulationConfig& pop);

// Interior best reply b* = c (sqrt(1 + v/(s c)) - 1) of the quasi-linear
// utility on the saturating/linear curve pair, and the utility curvature
// there; used to resolve step sizes.
double br_optimum(double value, double half_sat, double slope);
double utility_curvature(double value, double saturation, double half_sat, double slope,
                         double bid);

// Per-bidder record of what actually happened, for recovery tests.
struct SimulatedBidder {
    GroundTruthBidder truth;
    std::vector<HourRecord> hours; // realized bid vs the hour's mean curve; active hours only
};

struct SimulationResult {
    std::vector<SimulatedBidder> bidders;
    std::uint64_t n_rows = 0;
};

// Streams the raw counterfactual log into `sink`. Each hour draws per-auction
// curves (base x diurnal modulation x jitter), records the twelve multiplier
// points of the realized bid, and advances the bidder's rule against the
// hour's mean curve. Identical (config, bidders) produce identical logs.
SimulationResult generate_market(const MarketConfig& config,
                                 std::span<const GroundTruthBidder> bidders, RowSink& sink);

// Same, collecting rows in memory.
SimulationResult generate_market(const MarketConfig& config,
                                 std::span<const GroundTruthBidder> bidders,
                                 std::vector<RawRow>& rows);

// DayNight guard: competition during 10:00-21:59 is scaled so rule-following
// bidders raise bids by about `day_uplift`.
SimulationResult generate_shift_market(const MarketConfig& config,
                                       std::span<const GroundTruthBidder> bidders,
                                       RowSink& sink);

// Scaling applied to (half_sat up, slope down) at this hour of day; the
// best-reply level scales by exactly this factor.
double hour_scale_factor(const MarketConfig& config, std::int64_t hour);

} // namespace bidcast
