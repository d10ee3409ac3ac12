#pragma once

#include "bidcast/regret.hpp"
#include "bidcast/series.hpp"
#include "bidcast/utility.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace bidcast {

enum class RuleKind { BR, MomentumBR, OGD, BRReg, FTRL, FTL, OGDBias };

std::string_view rule_name(RuleKind kind);
std::optional<RuleKind> rule_from_name(std::string_view name);

// A fully fitted update rule. Immutable once fitted; predictions for distinct
// bidders can run in parallel.
struct FittedRule {
    RuleKind kind = RuleKind::OGD;
    double value = 0.0;   // estimated value-per-click
    double eta = 0.0;     // step size; unused by BR, MomentumBR, FTL
    double beta = 0.9;    // recency discount (FTRL)
    VisibilityParams vis; // OGDBias parameters; vis.value mirrors `value`
    double max_bid = 0.0; // outputs projected to [0, max_bid]
};

enum class PredictionMode { Series, Stepahead };

struct PredictionRun {
    PredictionMode mode = PredictionMode::Series;
    std::vector<double> predictions; // aligned with the test hours
};

// argmax of the quasi-linear utility over [0, max_bid] by golden-section
// search; the utility is strictly concave so the maximizer is unique.
double br_bid(double value, const HourlyCurveSet& curves, double max_bid);

// One explicit gradient step, projected to the bounds. OGDBias rules step
// along the visibility-biased gradient.
double ogd_step(const FittedRule& rule, double prev_bid, const HourlyCurveSet& curves);

// Implicit (proximal) gradient step: the unique root of
//   g(b) = b - prev_bid - eta * du/db(b)
// on [0, max_bid], found by bisection to |g| < 1e-8. When g has no sign
// change in the bounds, returns the boundary with the smaller |g|.
double brreg_step(const FittedRule& rule, double prev_bid, const HourlyCurveSet& curves);

// argmax_b sum_tau beta^(t-tau) u_tau(b) - b^2/(2 eta) over the bounds.
// `history` is ordered oldest to newest; the newest term has weight 1.
double ftrl_step(const FittedRule& rule, std::span<const HourlyCurveSet> history);

// Follow-the-leader: argmax of the undiscounted utility sum.
double ftl_step(const FittedRule& rule, std::span<const HourlyCurveSet> history);

// Average of the current bid and the best reply.
double momentum_br_step(const FittedRule& rule, double prev_bid, const HourlyCurveSet& curves);

// Closed-form step size: the through-origin regression of bid changes on the
// utility gradient, with positivity enforced by taking the absolute value.
// Throws ZeroGradient when every gradient is zero.
double fit_eta_ogd(std::span<const HourRecord> train, double value);

// Same regression against the visibility-biased gradient.
double fit_eta_ogd_vis(std::span<const HourRecord> train, const VisibilityParams& vis);

// 40 logarithmically spaced candidates over [1e-4, 1e4] * (mean bid / mean |grad|).
std::vector<double> eta_grid(std::span<const HourRecord> train, double value);

// Grid search minimizing the one-step-ahead squared error on the train span;
// ties break toward the smaller eta. Supported kinds: BRReg, FTRL.
double fit_eta_grid(std::span<const HourRecord> train, double value, RuleKind kind,
                    double beta, double max_bid);

struct OgdBiasFit {
    double alpha = 0.0;
    double vis0 = 0.0;
    double eta = 0.0;
    double train_mape = 0.0;
};

// Joint grid fit of (alpha, vis0) by train one-step MAPE, with eta refit in
// closed form per candidate. Ties prefer alpha = 0, then the smaller vis0,
// so the fit never scores worse than plain OGD on the train data.
OgdBiasFit fit_ogdbias(std::span<const HourRecord> train, double value, int sign,
                       double max_bid);

std::span<const double> ogdbias_alpha_grid();
std::span<const double> ogdbias_vis0_grid();

// Everything needed to take a rule from train data to a FittedRule.
struct RuleConfig {
    double beta = 0.9;
    int vis_sign = +1;
    double bmax_mult = 6.0; // max_bid = bmax_mult * mean train bid
    bool stepahead_refit_value = true;
    std::optional<double> fixed_value;
    std::optional<double> fixed_eta;
    std::optional<VisibilityParams> fixed_vis;
    EstimatorConfig estimator;
};

FittedRule fit_rule(RuleKind kind, std::span<const HourRecord> train, const RuleConfig& cfg);

// Series task: iterate the frozen rule forward from the anchor bid, feeding
// its own predictions back as state; curves seen are the true past curves.
PredictionRun run_series(const FittedRule& rule, const PredictionProblem& problem);

// Value estimates per stepahead refit are rule-independent; when several
// rules run over the same problem a shared cache avoids recomputing them.
struct StepaheadValueCache {
    std::vector<double> by_step;
};

// Stepahead task: refit on all true data up to each step, then predict one
// step from the true previous bid. BR is memoryless in the bids, so its
// stepahead predictions reuse the train-fitted rule and equal the series run.
PredictionRun run_stepahead(RuleKind kind, const PredictionProblem& problem,
                            const RuleConfig& cfg, StepaheadValueCache* cache = nullptr);

} // namespace bidcast
