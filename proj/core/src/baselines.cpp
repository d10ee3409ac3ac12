#include "bidcast/baselines.hpp"

#include "bidcast/errors.hpp"
#include "bidcast/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace bidcast {

FeatureRow make_feature_row(double lag1, double lag2, const HourlyCurveSet& curves1,
                            const HourlyCurveSet& curves2, bool use_econ, double target) {
    FeatureRow row;
    row.lag1 = lag1;
    row.lag2 = lag2;
    row.target = target;
    row.has_econ = use_econ;
    if (use_econ) {
        row.econ = {curves1.click.value(lag1), curves2.click.value(lag2),
                    curves1.cost.value(lag1),  curves2.cost.value(lag2),
                    curves1.click.grad(lag1),  curves1.cost.grad(lag1)};
    }
    return row;
}

std::vector<FeatureRow> training_rows(std::span<const HourRecord> hours, bool use_econ) {
    std::vector<FeatureRow> rows;
    if (hours.size() < 3) return rows;
    rows.reserve(hours.size() - 2);
    for (std::size_t t = 2; t < hours.size(); ++t) {
        rows.push_back(make_feature_row(hours[t - 1].bid, hours[t - 2].bid,
                                        hours[t - 1].curves, hours[t - 2].curves, use_econ,
                                        hours[t].bid));
    }
    return rows;
}

// ---------------------------------------------------------------- AR2

double Ar2Model::predict(const FeatureRow& row) const {
    double y = coef[0];
    for (std::size_t i = 0; i < row.dim(); ++i) y += coef[static_cast<int>(i) + 1] * row.feature(i);
    return y;
}

Ar2Model fit_ar2(std::span<const FeatureRow> rows) {
    if (rows.size() < 3) throw TooFewRows("fit_ar2: need at least 3 rows");
    const std::size_t d = rows.front().dim() + 1;
    Eigen::MatrixXd x(rows.size(), d);
    Eigen::VectorXd y(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        x(static_cast<int>(r), 0) = 1.0;
        for (std::size_t i = 0; i + 1 < d; ++i)
            x(static_cast<int>(r), static_cast<int>(i) + 1) = rows[r].feature(i);
        y(static_cast<int>(r)) = rows[r].target;
    }

    const Eigen::MatrixXd a = x.transpose() * x;
    const Eigen::VectorXd b = x.transpose() * y;

    Ar2Model model;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.rank() == static_cast<Eigen::Index>(d)) {
        model.coef = lu.solve(b);
    } else {
        // ridge on the non-intercept weights only, so exactly collinear
        // features (e.g. constant columns) get zero weight
        Eigen::MatrixXd reg = a;
        for (std::size_t i = 1; i < d; ++i) reg(static_cast<int>(i), static_cast<int>(i)) += 1e-8;
        model.coef = reg.ldlt().solve(b);
        model.used_ridge = true;
    }
    return model;
}

// ---------------------------------------------------------------- RF2

double RegressionTree::predict(const FeatureRow& row) const {
    int i = 0;
    while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
        const TreeNode& n = nodes[static_cast<std::size_t>(i)];
        i = row.feature(static_cast<std::size_t>(n.feature)) <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].value;
}

double ForestModel::predict(const FeatureRow& row) const {
    double s = 0.0;
    for (const auto& t : trees) s += t.predict(row);
    return s / static_cast<double>(trees.size());
}

namespace {

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double sse = std::numeric_limits<double>::infinity();
};

double subset_sse(std::span<const FeatureRow> rows, std::span<const std::size_t> idx) {
    double s = 0.0, ss = 0.0;
    for (std::size_t i : idx) {
        s += rows[i].target;
        ss += rows[i].target * rows[i].target;
    }
    const double n = static_cast<double>(idx.size());
    return ss - s * s / n;
}

SplitChoice best_split(std::span<const FeatureRow> rows, std::span<const std::size_t> idx,
                       std::size_t n_features) {
    SplitChoice best;
    const double parent = subset_sse(rows, idx);
    if (parent <= 0.0) return best;

    std::vector<std::size_t> order(idx.begin(), idx.end());
    for (std::size_t f = 0; f < n_features; ++f) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double fa = rows[a].feature(f), fb = rows[b].feature(f);
            return fa != fb ? fa < fb : a < b;
        });
        double left_s = 0.0, left_ss = 0.0;
        double tot_s = 0.0, tot_ss = 0.0;
        for (std::size_t i : order) {
            tot_s += rows[i].target;
            tot_ss += rows[i].target * rows[i].target;
        }
        for (std::size_t k = 0; k + 1 < order.size(); ++k) {
            const double t = rows[order[k]].target;
            left_s += t;
            left_ss += t * t;
            const double xv = rows[order[k]].feature(f);
            const double xn = rows[order[k + 1]].feature(f);
            if (xv == xn) continue;
            const double nl = static_cast<double>(k + 1);
            const double nr = static_cast<double>(order.size() - k - 1);
            const double sse = (left_ss - left_s * left_s / nl) +
                               ((tot_ss - left_ss) - (tot_s - left_s) * (tot_s - left_s) / nr);
            if (sse < best.sse - 1e-12) {
                best = {true, static_cast<int>(f), 0.5 * (xv + xn), sse};
            }
        }
    }
    return best;
}

int grow_node(std::span<const FeatureRow> rows, std::vector<std::size_t> idx, int depth,
              int max_depth, RegressionTree& tree) {
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    double mean = 0.0;
    for (std::size_t i : idx) mean += rows[i].target;
    mean /= static_cast<double>(idx.size());
    tree.nodes[static_cast<std::size_t>(node_id)].value = mean;

    if (depth >= max_depth || idx.size() < 2) return node_id;
    const SplitChoice split = best_split(rows, idx, rows.front().dim());
    if (!split.found) return node_id;

    std::vector<std::size_t> left, right;
    for (std::size_t i : idx) {
        if (rows[i].feature(static_cast<std::size_t>(split.feature)) <= split.threshold)
            left.push_back(i);
        else
            right.push_back(i);
    }
    const int l = grow_node(rows, std::move(left), depth + 1, max_depth, tree);
    const int r = grow_node(rows, std::move(right), depth + 1, max_depth, tree);
    TreeNode& n = tree.nodes[static_cast<std::size_t>(node_id)];
    n.feature = split.feature;
    n.threshold = split.threshold;
    n.left = l;
    n.right = r;
    return node_id;
}

} // namespace

ForestModel fit_rf2(std::span<const FeatureRow> rows, std::uint64_t seed, const RfConfig& cfg) {
    if (rows.size() < 5) throw TooFewRows("fit_rf2: need at least 5 rows");
    ForestModel forest;
    forest.trees.reserve(static_cast<std::size_t>(cfg.n_trees));
    for (int t = 0; t < cfg.n_trees; ++t) {
        Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(t));
        std::vector<std::size_t> sample(rows.size());
        for (auto& s : sample) s = static_cast<std::size_t>(rng.uniform_index(rows.size()));
        RegressionTree tree;
        grow_node(rows, std::move(sample), 0, cfg.max_depth, tree);
        forest.trees.push_back(std::move(tree));
    }
    return forest;
}

// ---------------------------------------------------------------- MLP2

namespace {

Eigen::VectorXd standardized_features(const MlpModel& m, const FeatureRow& row) {
    const auto d = static_cast<Eigen::Index>(row.dim());
    Eigen::VectorXd x(d);
    for (Eigen::Index i = 0; i < d; ++i)
        x(i) = (row.feature(static_cast<std::size_t>(i)) - m.x_mean(i)) / m.x_std(i);
    return x;
}

struct BatchData {
    Eigen::MatrixXd x; // n x in, standardized
    Eigen::VectorXd y; // n, standardized
};

// forward + backward pass; returns the batch MSE in standardized space
double backprop(const MlpModel& m, const BatchData& batch, MlpGradients& g) {
    const auto n = batch.x.rows();
    const Eigen::MatrixXd z1 =
        (batch.x * m.w1).rowwise() + m.b1.transpose(); // n x h
    const Eigen::MatrixXd a1 = z1.cwiseMax(0.0);
    const Eigen::MatrixXd z2 = (a1 * m.w2).rowwise() + m.b2.transpose();
    const Eigen::MatrixXd a2 = z2.cwiseMax(0.0);
    const Eigen::VectorXd yhat = (a2 * m.w3).array() + m.b3;

    const Eigen::VectorXd err = yhat - batch.y;
    const double loss = err.squaredNorm() / static_cast<double>(n);

    const Eigen::VectorXd dyhat = 2.0 * err / static_cast<double>(n);
    g.w3 = a2.transpose() * dyhat;
    g.b3 = dyhat.sum();
    const Eigen::MatrixXd da2 = dyhat * m.w3.transpose();
    const Eigen::MatrixXd dz2 =
        da2.array() * (z2.array() > 0.0).cast<double>();
    g.w2 = a1.transpose() * dz2;
    g.b2 = dz2.colwise().sum();
    const Eigen::MatrixXd da1 = dz2 * m.w2.transpose();
    const Eigen::MatrixXd dz1 =
        da1.array() * (z1.array() > 0.0).cast<double>();
    g.w1 = batch.x.transpose() * dz1;
    g.b1 = dz1.colwise().sum();
    return loss;
}

struct AdamState {
    Eigen::MatrixXd mw1, vw1, mw2, vw2;
    Eigen::VectorXd mb1, vb1, mb2, vb2, mw3, vw3;
    double mb3 = 0.0, vb3 = 0.0;
    long t = 0;
};

void adam_update_matrix(Eigen::MatrixXd& p, const Eigen::MatrixXd& g, Eigen::MatrixXd& m,
                        Eigen::MatrixXd& v, const MlpConfig& cfg, double bc1, double bc2) {
    m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * g;
    v = cfg.adam_beta2 * v.array().matrix() + (1.0 - cfg.adam_beta2) * g.array().square().matrix();
    p.array() -= cfg.learning_rate * (m.array() / bc1) /
                 ((v.array() / bc2).sqrt() + cfg.adam_eps);
}

void adam_update_vector(Eigen::VectorXd& p, const Eigen::VectorXd& g, Eigen::VectorXd& m,
                        Eigen::VectorXd& v, const MlpConfig& cfg, double bc1, double bc2) {
    m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * g;
    v = cfg.adam_beta2 * v.array().matrix() + (1.0 - cfg.adam_beta2) * g.array().square().matrix();
    p.array() -= cfg.learning_rate * (m.array() / bc1) /
                 ((v.array() / bc2).sqrt() + cfg.adam_eps);
}

void adam_update_scalar(double& p, double g, double& m, double& v, const MlpConfig& cfg,
                        double bc1, double bc2) {
    m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * g;
    v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * g * g;
    p -= cfg.learning_rate * (m / bc1) / (std::sqrt(v / bc2) + cfg.adam_eps);
}

Eigen::MatrixXd glorot(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Eigen::MatrixXd w(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) w(i, j) = rng.uniform(-limit, limit);
    return w;
}

} // namespace

double MlpModel::predict(const FeatureRow& row) const {
    const Eigen::VectorXd x = standardized_features(*this, row);
    const Eigen::VectorXd a1 = ((w1.transpose() * x) + b1).cwiseMax(0.0);
    const Eigen::VectorXd a2 = ((w2.transpose() * a1) + b2).cwiseMax(0.0);
    const double ys = w3.dot(a2) + b3;
    return ys * y_std + y_mean;
}

double mlp_loss_and_grad(const MlpModel& model, std::span<const FeatureRow> rows,
                         MlpGradients* grads) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto d = static_cast<Eigen::Index>(rows.front().dim());
    BatchData batch;
    batch.x.resize(n, d);
    batch.y.resize(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        batch.x.row(r) = standardized_features(model, rows[static_cast<std::size_t>(r)]);
        batch.y(r) = (rows[static_cast<std::size_t>(r)].target - model.y_mean) / model.y_std;
    }
    MlpGradients local;
    MlpGradients& g = grads ? *grads : local;
    return backprop(model, batch, g);
}

MlpModel fit_mlp2(std::span<const FeatureRow> rows, std::uint64_t seed, const MlpConfig& cfg) {
    if (rows.size() < 10) throw TooFewRows("fit_mlp2: need at least 10 rows");
    const auto d = static_cast<Eigen::Index>(rows.front().dim());
    const auto h = static_cast<Eigen::Index>(cfg.hidden);

    MlpModel m;
    m.x_mean = Eigen::VectorXd::Zero(d);
    m.x_std = Eigen::VectorXd::Ones(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        double s = 0.0;
        for (const auto& r : rows) s += r.feature(static_cast<std::size_t>(i));
        m.x_mean(i) = s / static_cast<double>(rows.size());
        double ss = 0.0;
        for (const auto& r : rows) {
            const double dd = r.feature(static_cast<std::size_t>(i)) - m.x_mean(i);
            ss += dd * dd;
        }
        const double sd = std::sqrt(ss / static_cast<double>(rows.size()));
        m.x_std(i) = sd > 0.0 ? sd : 1.0;
    }
    {
        double s = 0.0;
        for (const auto& r : rows) s += r.target;
        m.y_mean = s / static_cast<double>(rows.size());
        double ss = 0.0;
        for (const auto& r : rows) ss += (r.target - m.y_mean) * (r.target - m.y_mean);
        const double sd = std::sqrt(ss / static_cast<double>(rows.size()));
        m.y_std = sd > 0.0 ? sd : 1.0;
    }

    Rng init_rng = Rng::substream(seed, 0);
    m.w1 = glorot(d, h, init_rng);
    m.b1 = Eigen::VectorXd::Zero(h);
    m.w2 = glorot(h, h, init_rng);
    m.b2 = Eigen::VectorXd::Zero(h);
    m.w3 = glorot(h, 1, init_rng).col(0);
    m.b3 = 0.0;

    AdamState adam;
    adam.mw1 = Eigen::MatrixXd::Zero(d, h);
    adam.vw1 = adam.mw1;
    adam.mw2 = Eigen::MatrixXd::Zero(h, h);
    adam.vw2 = adam.mw2;
    adam.mb1 = Eigen::VectorXd::Zero(h);
    adam.vb1 = adam.mb1;
    adam.mb2 = adam.mb1;
    adam.vb2 = adam.mb1;
    adam.mw3 = adam.mb1;
    adam.vw3 = adam.mb1;

    std::vector<std::size_t> perm(rows.size());
    std::iota(perm.begin(), perm.end(), 0);
    MlpGradients g;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle_rng = Rng::substream(seed, static_cast<std::uint64_t>(epoch) + 1);
        shuffle_rng.shuffle(perm.data(), perm.size());
        for (std::size_t start = 0; start < perm.size();
             start += static_cast<std::size_t>(cfg.batch)) {
            const std::size_t stop =
                std::min(start + static_cast<std::size_t>(cfg.batch), perm.size());
            const auto bn = static_cast<Eigen::Index>(stop - start);
            BatchData batch;
            batch.x.resize(bn, d);
            batch.y.resize(bn);
            for (Eigen::Index r = 0; r < bn; ++r) {
                const FeatureRow& row = rows[perm[start + static_cast<std::size_t>(r)]];
                batch.x.row(r) = standardized_features(m, row);
                batch.y(r) = (row.target - m.y_mean) / m.y_std;
            }
            backprop(m, batch, g);
            adam.t += 1;
            const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(adam.t));
            const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(adam.t));
            adam_update_matrix(m.w1, g.w1, adam.mw1, adam.vw1, cfg, bc1, bc2);
            adam_update_vector(m.b1, g.b1, adam.mb1, adam.vb1, cfg, bc1, bc2);
            adam_update_matrix(m.w2, g.w2, adam.mw2, adam.vw2, cfg, bc1, bc2);
            adam_update_vector(m.b2, g.b2, adam.mb2, adam.vb2, cfg, bc1, bc2);
            adam_update_vector(m.w3, g.w3, adam.mw3, adam.vw3, cfg, bc1, bc2);
            adam_update_scalar(m.b3, g.b3, adam.mb3, adam.vb3, cfg, bc1, bc2);
        }
    }
    return m;
}

// ---------------------------------------------------------------- dispatch

std::string_view baseline_name(BaselineKind kind, bool use_econ) {
    switch (kind) {
        case BaselineKind::AR2: return use_econ ? "AR2Econ" : "AR2";
        case BaselineKind::RF2: return use_econ ? "RF2Econ" : "RF2";
        case BaselineKind::MLP2: return use_econ ? "MLP2Econ" : "MLP2";
        case BaselineKind::SeasonalMean: return "SeasonalMean";
    }
    return "?";
}

double FittedBaselineModel::predict(const FeatureRow& row) const {
    switch (kind) {
        case BaselineKind::AR2: return ar2.predict(row);
        case BaselineKind::RF2: return rf.predict(row);
        case BaselineKind::MLP2: return mlp.predict(row);
        case BaselineKind::SeasonalMean: break;
    }
    return 0.0;
}

FittedBaselineModel fit_baseline_model(BaselineKind kind, std::span<const FeatureRow> rows,
                                       const BaselineConfig& cfg, std::uint64_t seed) {
    FittedBaselineModel f;
    f.kind = kind;
    switch (kind) {
        case BaselineKind::AR2: f.ar2 = fit_ar2(rows); break;
        case BaselineKind::RF2: f.rf = fit_rf2(rows, seed, cfg.rf); break;
        case BaselineKind::MLP2: f.mlp = fit_mlp2(rows, seed, cfg.mlp); break;
        case BaselineKind::SeasonalMean: break;
    }
    return f;
}

PredictionRun predict_baseline(BaselineKind kind, PredictionMode mode,
                               const PredictionProblem& problem, bool use_econ,
                               const BaselineConfig& cfg, std::uint64_t seed,
                               const FittedBaselineModel* prefit) {
    if (kind == BaselineKind::SeasonalMean) return seasonal_mean(problem, mode);

    const double max_bid = cfg.bmax_mult * mean_bid(problem.train);
    const auto clamp = [&](double p) { return std::clamp(p, 0.0, max_bid); };

    PredictionRun run;
    run.mode = mode;
    run.predictions.reserve(problem.test.size());

    std::vector<FeatureRow> rows = training_rows(problem.train, use_econ);

    if (mode == PredictionMode::Series) {
        const FittedBaselineModel model =
            prefit ? *prefit : fit_baseline_model(kind, rows, cfg, seed);
        double lag1 = problem.train[problem.anchor].bid;
        double lag2 = problem.anchor > 0 ? problem.train[problem.anchor - 1].bid : lag1;
        const HourlyCurveSet* c1 = &problem.train[problem.anchor].curves;
        const HourlyCurveSet* c2 =
            problem.anchor > 0 ? &problem.train[problem.anchor - 1].curves : c1;
        for (std::size_t k = 0; k < problem.test.size(); ++k) {
            const FeatureRow row = make_feature_row(lag1, lag2, *c1, *c2, use_econ, 0.0);
            const double pred = clamp(model.predict(row));
            run.predictions.push_back(pred);
            lag2 = lag1;
            lag1 = pred;
            c2 = c1;
            c1 = &problem.test[k].curves;
        }
        return run;
    }

    // stepahead: true lags, retrain each step
    FittedBaselineModel model = prefit ? *prefit : fit_baseline_model(kind, rows, cfg, seed);
    const bool retrain = kind != BaselineKind::MLP2 || cfg.mlp_stepahead_full_retrain;
    double lag1 = problem.train[problem.anchor].bid;
    double lag2 = problem.anchor > 0 ? problem.train[problem.anchor - 1].bid : lag1;
    const HourlyCurveSet* c1 = &problem.train[problem.anchor].curves;
    const HourlyCurveSet* c2 =
        problem.anchor > 0 ? &problem.train[problem.anchor - 1].curves : c1;
    for (std::size_t k = 0; k < problem.test.size(); ++k) {
        if (k > 0 && retrain)
            model = fit_baseline_model(kind, rows, cfg, mix_seed(seed, k));
        const FeatureRow row = make_feature_row(lag1, lag2, *c1, *c2, use_econ, 0.0);
        run.predictions.push_back(clamp(model.predict(row)));

        // the true hour becomes available: extend the train rows and lags
        rows.push_back(make_feature_row(lag1, lag2, *c1, *c2, use_econ, problem.test[k].bid));
        lag2 = lag1;
        lag1 = problem.test[k].bid;
        c2 = c1;
        c1 = &problem.test[k].curves;
    }
    return run;
}

PredictionRun seasonal_mean(const PredictionProblem& problem, PredictionMode mode) {
    std::map<int, std::pair<double, int>> by_hod; // hod -> (sum, count)
    const auto hod_of = [](std::int64_t hour) {
        return static_cast<int>(((hour % 24) + 24) % 24);
    };
    for (const auto& h : problem.train) {
        auto& [sum, count] = by_hod[hod_of(h.hour)];
        sum += h.bid;
        count += 1;
    }
    for (const auto& h : problem.test) {
        const auto it = by_hod.find(hod_of(h.hour));
        if (it == by_hod.end() || it->second.second < 2)
            throw InsufficientCoverage("seasonal_mean: hour-of-day seen fewer than twice in train");
    }

    PredictionRun run;
    run.mode = mode;
    run.predictions.reserve(problem.test.size());
    for (const auto& h : problem.test) {
        const auto& [sum, count] = by_hod[hod_of(h.hour)];
        run.predictions.push_back(sum / count);
        if (mode == PredictionMode::Stepahead) {
            auto& [s2, c2] = by_hod[hod_of(h.hour)];
            s2 += h.bid;
            c2 += 1;
        }
    }
    return run;
}

} // namespace bidcast
