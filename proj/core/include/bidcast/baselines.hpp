#pragma once

#include "bidcast/forecasters.hpp"
#include "bidcast/series.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace bidcast {

// Lag-2 regression row. The econ block holds, in order: click(lag1),
// click(lag2), cpc(lag1), cpc(lag2), click'(lag1), cpc'(lag1), where the
// curves are the ones observed at the hours the lag bids were placed.
struct FeatureRow {
    double lag1 = 0.0;
    double lag2 = 0.0;
    std::array<double, 6> econ{};
    bool has_econ = false;
    double target = 0.0;

    std::size_t dim() const { return has_econ ? 8 : 2; }
    double feature(std::size_t i) const {
        if (i == 0) return lag1;
        if (i == 1) return lag2;
        return econ[i - 2];
    }
};

FeatureRow make_feature_row(double lag1, double lag2, const HourlyCurveSet& curves1,
                            const HourlyCurveSet& curves2, bool use_econ, double target);

// Rows for every in-span transition with two lags available.
std::vector<FeatureRow> training_rows(std::span<const HourRecord> hours, bool use_econ);

struct Ar2Model {
    Eigen::VectorXd coef; // [intercept, w_lag1, w_lag2, w_econ...]
    bool used_ridge = false;

    double predict(const FeatureRow& row) const;
};

// Ordinary least squares on the normal equations; on rank deficiency the
// non-intercept weights get a 1e-8 ridge so collinear features shrink to zero.
Ar2Model fit_ar2(std::span<const FeatureRow> rows);

struct TreeNode {
    int feature = -1; // -1: leaf
    double threshold = 0.0;
    double value = 0.0;
    int left = -1;
    int right = -1;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;
    double predict(const FeatureRow& row) const;
};

struct RfConfig {
    int n_trees = 100;
    int max_depth = 2;
};

struct ForestModel {
    std::vector<RegressionTree> trees;
    double predict(const FeatureRow& row) const;
};

// Bootstrap forest of depth-limited variance-reduction trees. Split
// thresholds sit at midpoints between sorted distinct feature values; ties
// keep the first (feature, threshold) in scan order for determinism.
ForestModel fit_rf2(std::span<const FeatureRow> rows, std::uint64_t seed,
                    const RfConfig& cfg = {});

struct MlpConfig {
    int hidden = 128;
    int epochs = 100;
    int batch = 10;
    double learning_rate = 1e-4;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
};

// Two-hidden-layer ReLU network trained with Adam on z-scored inputs and
// target. Deterministic given the seed (Glorot-uniform init and per-epoch
// shuffles both derive from it).
struct MlpModel {
    Eigen::MatrixXd w1, w2; // (in x h), (h x h)
    Eigen::VectorXd b1, b2; // (h)
    Eigen::VectorXd w3;     // (h)
    double b3 = 0.0;
    Eigen::VectorXd x_mean, x_std;
    double y_mean = 0.0, y_std = 1.0;

    double predict(const FeatureRow& row) const;
};

MlpModel fit_mlp2(std::span<const FeatureRow> rows, std::uint64_t seed,
                  const MlpConfig& cfg = {});

// Full-batch MSE (in standardized space) and its gradient, packed in a
// model-shaped struct; the training loop runs the same backprop on batches.
struct MlpGradients {
    Eigen::MatrixXd w1, w2;
    Eigen::VectorXd b1, b2, w3;
    double b3 = 0.0;
};
double mlp_loss_and_grad(const MlpModel& model, std::span<const FeatureRow> rows,
                         MlpGradients* grads);

enum class BaselineKind { AR2, RF2, MLP2, SeasonalMean };

std::string_view baseline_name(BaselineKind kind, bool use_econ);

struct BaselineConfig {
    RfConfig rf;
    MlpConfig mlp;
    bool mlp_stepahead_full_retrain = true;
    double bmax_mult = 6.0; // predictions clamped to [0, bmax_mult * mean train bid]
};

// A baseline fitted on the train rows; reusable across prediction modes.
struct FittedBaselineModel {
    BaselineKind kind = BaselineKind::AR2;
    Ar2Model ar2;
    ForestModel rf;
    MlpModel mlp;

    double predict(const FeatureRow& row) const;
};

FittedBaselineModel fit_baseline_model(BaselineKind kind, std::span<const FeatureRow> rows,
                                       const BaselineConfig& cfg, std::uint64_t seed);

// Fit on the train span and predict the test span. Series mode feeds
// predictions back as lags and evaluates the econ features at them;
// stepahead mode uses true lags and retrains at every step (the MLP may skip
// the per-step retrain via config). `prefit` skips the initial train fit; it
// must come from fit_baseline_model on the same rows, config and seed.
PredictionRun predict_baseline(BaselineKind kind, PredictionMode mode,
                               const PredictionProblem& problem, bool use_econ,
                               const BaselineConfig& cfg, std::uint64_t seed,
                               const FittedBaselineModel* prefit = nullptr);

// Hour-of-day mean of the train bids. Requires every predicted hour-of-day
// to appear at least twice in the train span.
PredictionRun seasonal_mean(const PredictionProblem& problem, PredictionMode mode);

} // namespace bidcast
