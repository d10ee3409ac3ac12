#pragma once

#include "bidcast/baselines.hpp"
#include "bidcast/dataset.hpp"
#include "bidcast/forecasters.hpp"
#include "bidcast/regret.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace bidcast {

// Mean absolute percentage error; throws ZeroTrueBid on a nonpositive truth.
double mape(std::span<const double> truth, std::span<const double> predicted);

// Box statistics with Tukey outlier handling: whiskers reach the furthest
// points within 1.5 IQR of the quartiles; the mean, its standard error and
// the 95% CI are computed over the non-outliers only.
struct DistStats {
    double q1 = 0.0, median = 0.0, q3 = 0.0;
    double whisker_lo = 0.0, whisker_hi = 0.0;
    double mean_excl = 0.0;
    double stderr_mean = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;
    std::size_t n = 0;
    std::size_t n_outliers = 0;
};

DistStats dist_stats(std::vector<double> scores); // throws TooFewScores below 4

struct HourlyProfile {
    std::array<double, 24> mean{}, p25{}, p75{};
    std::size_t n_instances = 0;
};

// Each instance's 24 bids are normalized by their own mean, then averaged
// per hour of day across instances.
HourlyProfile hourly_profile(std::span<const std::array<double, 24>> day_bids);

// ------------------------------------------------------------------ runner

struct MethodSpec {
    std::string name;
    bool is_rule = true;
    RuleKind rule = RuleKind::OGD;
    BaselineKind baseline = BaselineKind::AR2;
    bool use_econ = false;
};

// "all" expands to the full method table; otherwise a comma-separated list
// of method names (BR, Momentum-BR, OGD, BR-Reg, FTRL, FTL, OGDBias, AR2,
// RF2, MLP2, AR2Econ, RF2Econ, MLP2Econ, SeasonalMean).
std::vector<MethodSpec> parse_methods(const std::string& spec);

struct ExperimentConfig {
    std::vector<MethodSpec> methods;
    std::vector<PredictionMode> modes = {PredictionMode::Series, PredictionMode::Stepahead};
    RuleConfig rule;
    BaselineConfig baseline;
    std::uint64_t seed = 0;
    int jobs = 0; // 0 = hardware concurrency
    bool collect_predictions = true;
    bool collect_estimates = true;
};

struct ScoreRow {
    std::string unit_id;
    std::string method;
    PredictionMode mode = PredictionMode::Series;
    double mape = 0.0;
    std::size_t n_test = 0;
};

struct PredictionRow {
    std::string unit_id;
    std::int64_t hour = 0;
    PredictionMode mode = PredictionMode::Series;
    std::string method;
    double predicted = 0.0;
    double truth = 0.0;
};

struct FailureRow {
    std::string unit_id;
    std::string method;
    std::string mode;
    std::string reason;
};

struct EstimateRow {
    std::string unit_id;
    double v_qr = 0.0;
    double v_mr = 0.0;
    double shade = 0.0;
    double daily_cv = 0.0;  // NaN when undefined
    double plausibility = 0.0; // NaN when undefined
    bool eligible = false;
};

struct OgdBiasParamRow {
    std::string unit_id;
    double alpha = 0.0;
    double vis0 = 0.0;
};

struct SummaryRow {
    std::string method;
    PredictionMode mode = PredictionMode::Series;
    DistStats stats;
};

struct EvalReport {
    std::vector<ScoreRow> scores;
    std::vector<PredictionRow> predictions;
    std::vector<FailureRow> failures;
    std::vector<EstimateRow> estimates;
    std::vector<OgdBiasParamRow> ogdbias_params;
    std::vector<SummaryRow> tables; // per mode, ranked by outlier-excluded mean
    std::optional<HourlyProfile> profile;

    const SummaryRow* find(const std::string& method, PredictionMode mode) const;
};

// Fits, predicts and scores every (unit, method, mode); per-unit failures are
// recorded and excluded, never silently dropped. Deterministic given the
// seed; units may be processed in parallel and are reduced in unit order.
EvalReport run_experiment(std::span<const EvalUnit> units, const ExperimentConfig& cfg);

std::string_view mode_name(PredictionMode mode);
std::optional<PredictionMode> mode_from_name(std::string_view name);

} // namespace bidcast
