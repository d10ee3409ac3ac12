#include "bidcast/forecasters.hpp"

#include "bidcast/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace bidcast {

namespace {

constexpr double kGoldenRatio = 0.6180339887498949; // (sqrt(5)-1)/2

template <typename F>
double golden_max(F&& f, double lo, double hi, double tol) {
    double a = lo, b = hi;
    double x1 = b - kGoldenRatio * (b - a);
    double x2 = a + kGoldenRatio * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGoldenRatio * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGoldenRatio * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

double clamp_bid(double bid, double max_bid) {
    return std::clamp(bid, 0.0, max_bid);
}

double search_tol(double max_bid) { return 1e-7 * std::max(max_bid, 1e-12); }

double rule_grad(const FittedRule& rule, const HourlyCurveSet& curves, double bid) {
    if (rule.kind == RuleKind::OGDBias)
        return visibility_grad(rule.vis, curves, bid);
    return quasilinear_grad(QuasiLinearParams{rule.value}, curves, bid);
}

} // namespace

std::string_view rule_name(RuleKind kind) {
    switch (kind) {
        case RuleKind::BR: return "BR";
        case RuleKind::MomentumBR: return "Momentum-BR";
        case RuleKind::OGD: return "OGD";
        case RuleKind::BRReg: return "BR-Reg";
        case RuleKind::FTRL: return "FTRL";
        case RuleKind::FTL: return "FTL";
        case RuleKind::OGDBias: return "OGDBias";
    }
    return "?";
}

std::optional<RuleKind> rule_from_name(std::string_view name) {
    for (RuleKind k : {RuleKind::BR, RuleKind::MomentumBR, RuleKind::OGD, RuleKind::BRReg,
                       RuleKind::FTRL, RuleKind::FTL, RuleKind::OGDBias}) {
        if (name == rule_name(k)) return k;
    }
    return std::nullopt;
}

double br_bid(double value, const HourlyCurveSet& curves, double max_bid) {
    const QuasiLinearParams params{value};
    return golden_max([&](double b) { return quasilinear_utility(params, curves, b); }, 0.0,
                      max_bid, search_tol(max_bid));
}

double ogd_step(const FittedRule& rule, double prev_bid, const HourlyCurveSet& curves) {
    return clamp_bid(prev_bid + rule.eta * rule_grad(rule, curves, prev_bid), rule.max_bid);
}

double brreg_step(const FittedRule& rule, double prev_bid, const HourlyCurveSet& curves) {
    if (rule.eta == 0.0) return clamp_bid(prev_bid, rule.max_bid);

    const QuasiLinearParams params{rule.value};
    const auto g = [&](double b) {
        return b - prev_bid - rule.eta * quasilinear_grad(params, curves, b);
    };

    double lo = 0.0, hi = rule.max_bid;
    double glo = g(lo), ghi = g(hi);
    // g is strictly increasing (g' = 1 - eta * u'' > 1), so no sign change
    // means the root lies outside the bounds.
    if (glo > 0.0) return std::fabs(glo) <= std::fabs(ghi) ? lo : hi;
    if (ghi < 0.0) return std::fabs(ghi) <= std::fabs(glo) ? hi : lo;

    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (std::fabs(gm) < 1e-8) return mid;
        if (gm < 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15 * std::max(1.0, rule.max_bid)) break;
    }
    return 0.5 * (lo + hi);
}

double ftrl_step(const FittedRule& rule, std::span<const HourlyCurveSet> history) {
    if (history.empty()) throw EmptySeries("ftrl_step: empty history");
    const std::size_t n = history.size();
    std::vector<double> weights(n);
    double w = 1.0;
    for (std::size_t i = n; i-- > 0;) {
        weights[i] = w;
        w *= rule.beta;
    }
    const QuasiLinearParams params{rule.value};
    const double inv_two_eta = 0.5 / rule.eta;
    const auto objective = [&](double b) {
        double s = -inv_two_eta * b * b;
        for (std::size_t i = 0; i < n; ++i)
            s += weights[i] * quasilinear_utility(params, history[i], b);
        return s;
    };
    return golden_max(objective, 0.0, rule.max_bid, search_tol(rule.max_bid));
}

double ftl_step(const FittedRule& rule, std::span<const HourlyCurveSet> history) {
    if (history.empty()) throw EmptySeries("ftl_step: empty history");
    const QuasiLinearParams params{rule.value};
    const auto objective = [&](double b) {
        double s = 0.0;
        for (const auto& h : history) s += quasilinear_utility(params, h, b);
        return s;
    };
    return golden_max(objective, 0.0, rule.max_bid, search_tol(rule.max_bid));
}

double momentum_br_step(const FittedRule& rule, double prev_bid, const HourlyCurveSet& curves) {
    return clamp_bid(0.5 * (prev_bid + br_bid(rule.value, curves, rule.max_bid)), rule.max_bid);
}

namespace {

template <typename GradFn>
double eta_regression(std::span<const HourRecord> train, GradFn&& grad_at) {
    if (train.size() < 2) throw TooShort("eta fit: need at least 2 train hours");
    double s_dg = 0.0, s_gg = 0.0;
    for (std::size_t t = 0; t + 1 < train.size(); ++t) {
        const double d = train[t + 1].bid - train[t].bid;
        const double g = grad_at(train[t]);
        s_dg += d * g;
        s_gg += g * g;
    }
    if (s_gg <= 0.0) throw ZeroGradient("eta fit: gradient sequence is identically zero");
    return std::fabs(s_dg / s_gg);
}

} // namespace

double fit_eta_ogd(std::span<const HourRecord> train, double value) {
    const QuasiLinearParams params{value};
    return eta_regression(train, [&](const HourRecord& h) {
        return quasilinear_grad(params, h.curves, h.bid);
    });
}

double fit_eta_ogd_vis(std::span<const HourRecord> train, const VisibilityParams& vis) {
    return eta_regression(
        train, [&](const HourRecord& h) { return visibility_grad(vis, h.curves, h.bid); });
}

std::vector<double> eta_grid(std::span<const HourRecord> train, double value) {
    if (train.size() < 2) throw TooShort("eta_grid: need at least 2 train hours");
    const QuasiLinearParams params{value};
    double abs_grad = 0.0;
    for (const auto& h : train)
        abs_grad += std::fabs(quasilinear_grad(params, h.curves, h.bid));
    abs_grad /= static_cast<double>(train.size());
    const double center = abs_grad > 0.0 ? mean_bid(train) / abs_grad : mean_bid(train);

    constexpr int kPoints = 40;
    std::vector<double> grid(kPoints);
    for (int i = 0; i < kPoints; ++i) {
        const double exponent = -4.0 + 8.0 * static_cast<double>(i) / (kPoints - 1);
        grid[static_cast<std::size_t>(i)] = center * std::pow(10.0, exponent);
    }
    return grid;
}

namespace {

// One-step-ahead squared error of BR-Reg on the train span at a given eta.
double brreg_train_sse(std::span<const HourRecord> train, const FittedRule& rule) {
    double sse = 0.0;
    for (std::size_t t = 0; t + 1 < train.size(); ++t) {
        const double pred = brreg_step(rule, train[t].bid, train[t].curves);
        const double err = pred - train[t + 1].bid;
        sse += err * err;
    }
    return sse;
}

// FTRL one-step errors for every candidate eta in a single sweep. The
// discounted utility sum is eta-independent, so it is accumulated once on a
// shared bid grid; per eta only the quadratic regularizer changes. The
// objective is concave on the grid and its argmax is nondecreasing in eta,
// so candidates are visited in ascending order with a hill climb from the
// previous argmax. A parabolic step through the three neighboring grid
// values refines the prediction.
std::vector<double> ftrl_train_sse(std::span<const HourRecord> train, double value, double beta,
                                   double max_bid, std::span<const double> etas) {
    constexpr std::size_t kGrid = 513;
    const QuasiLinearParams params{value};
    std::array<double, kGrid> bids{}, discounted{};
    for (std::size_t k = 0; k < kGrid; ++k)
        bids[k] = max_bid * static_cast<double>(k) / (kGrid - 1);

    std::vector<double> sse(etas.size(), 0.0);
    for (std::size_t t = 0; t + 1 < train.size(); ++t) {
        for (std::size_t k = 0; k < kGrid; ++k) {
            discounted[k] = beta * discounted[k] +
                            quasilinear_utility(params, train[t].curves, bids[k]);
        }
        std::size_t best_k = 0;
        for (std::size_t e = 0; e < etas.size(); ++e) {
            const double inv_two_eta = 0.5 / etas[e];
            const auto obj = [&](std::size_t k) {
                return discounted[k] - inv_two_eta * bids[k] * bids[k];
            };
            while (best_k + 1 < kGrid && obj(best_k + 1) > obj(best_k)) ++best_k;
            double pred = bids[best_k];
            if (best_k > 0 && best_k + 1 < kGrid) {
                const double h = bids[1] - bids[0];
                const double denom = obj(best_k - 1) - 2.0 * obj(best_k) + obj(best_k + 1);
                if (denom < 0.0) {
                    const double shift = 0.5 * h * (obj(best_k - 1) - obj(best_k + 1)) / denom;
                    pred = std::clamp(bids[best_k] + std::clamp(shift, -h, h), 0.0, max_bid);
                }
            }
            const double err = pred - train[t + 1].bid;
            sse[e] += err * err;
        }
    }
    return sse;
}

} // namespace

double fit_eta_grid(std::span<const HourRecord> train, double value, RuleKind kind, double beta,
                    double max_bid) {
    const auto grid = eta_grid(train, value);

    std::vector<double> sse;
    if (kind == RuleKind::FTRL) {
        sse = ftrl_train_sse(train, value, beta, max_bid, grid);
    } else {
        sse.reserve(grid.size());
        FittedRule rule;
        rule.kind = RuleKind::BRReg;
        rule.value = value;
        rule.max_bid = max_bid;
        for (double eta : grid) {
            rule.eta = eta;
            sse.push_back(brreg_train_sse(train, rule));
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < sse.size(); ++i)
        if (sse[i] < sse[best]) best = i; // strict: ties keep the smaller eta
    return grid[best];
}

namespace {

constexpr std::array<double, 11> kAlphaGrid = {0.0,  1.0,   2.0,   5.0,  10.0, 20.0,
                                               50.0, 100.0, 150.0, 200.0, 300.0};
constexpr std::array<double, 11> kVis0Grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                              0.6, 0.7, 0.8, 0.9, 1.0};

} // namespace

std::span<const double> ogdbias_alpha_grid() { return kAlphaGrid; }
std::span<const double> ogdbias_vis0_grid() { return kVis0Grid; }

OgdBiasFit fit_ogdbias(std::span<const HourRecord> train, double value, int sign,
                       double max_bid) {
    if (train.size() < 2) throw TooShort("fit_ogdbias: need at least 2 train hours");

    OgdBiasFit best;
    best.train_mape = std::numeric_limits<double>::infinity();
    for (double alpha : kAlphaGrid) {
        for (double vis0 : kVis0Grid) {
            const VisibilityParams vis{value, alpha, vis0, sign};
            double eta = 0.0;
            try {
                eta = fit_eta_ogd_vis(train, vis);
            } catch (const ZeroGradient&) {
                eta = 0.0;
            }
            double err_sum = 0.0;
            std::size_t n = 0;
            for (std::size_t t = 0; t + 1 < train.size(); ++t) {
                const double g = visibility_grad(vis, train[t].curves, train[t].bid);
                const double pred = std::clamp(train[t].bid + eta * g, 0.0, max_bid);
                err_sum += std::fabs(pred - train[t + 1].bid) / train[t + 1].bid;
                ++n;
            }
            const double mape = err_sum / static_cast<double>(n);
            if (mape < best.train_mape) { // grid order encodes the tie-break
                best = {alpha, vis0, eta, mape};
            }
        }
    }
    return best;
}

FittedRule fit_rule(RuleKind kind, std::span<const HourRecord> train, const RuleConfig& cfg) {
    FittedRule rule;
    rule.kind = kind;
    rule.beta = cfg.beta;
    rule.max_bid = cfg.bmax_mult * mean_bid(train);

    rule.value = cfg.fixed_value ? *cfg.fixed_value
                                 : estimate_values(train, cfg.estimator).quantal;

    switch (kind) {
        case RuleKind::BR:
        case RuleKind::MomentumBR:
        case RuleKind::FTL:
            break;
        case RuleKind::OGD:
            rule.eta = cfg.fixed_eta ? *cfg.fixed_eta : fit_eta_ogd(train, rule.value);
            break;
        case RuleKind::BRReg:
        case RuleKind::FTRL:
            rule.eta = cfg.fixed_eta
                           ? *cfg.fixed_eta
                           : fit_eta_grid(train, rule.value, kind, cfg.beta, rule.max_bid);
            break;
        case RuleKind::OGDBias: {
            if (cfg.fixed_vis) {
                rule.vis = *cfg.fixed_vis;
                rule.vis.value = rule.value;
                rule.eta = cfg.fixed_eta ? *cfg.fixed_eta
                                         : fit_eta_ogd_vis(train, rule.vis);
            } else {
                const OgdBiasFit fit = fit_ogdbias(train, rule.value, cfg.vis_sign, rule.max_bid);
                rule.vis = VisibilityParams{rule.value, fit.alpha, fit.vis0, cfg.vis_sign};
                rule.eta = cfg.fixed_eta ? *cfg.fixed_eta : fit.eta;
            }
            break;
        }
    }
    return rule;
}

namespace {

bool needs_history(RuleKind kind) {
    return kind == RuleKind::FTRL || kind == RuleKind::FTL;
}

double advance(const FittedRule& rule, double state, const HourlyCurveSet& prev_curves,
               std::span<const HourlyCurveSet> history) {
    switch (rule.kind) {
        case RuleKind::BR: return br_bid(rule.value, prev_curves, rule.max_bid);
        case RuleKind::MomentumBR: return momentum_br_step(rule, state, prev_curves);
        case RuleKind::OGD:
        case RuleKind::OGDBias: return ogd_step(rule, state, prev_curves);
        case RuleKind::BRReg: return brreg_step(rule, state, prev_curves);
        case RuleKind::FTRL: return ftrl_step(rule, history);
        case RuleKind::FTL: return ftl_step(rule, history);
    }
    return state;
}

} // namespace

PredictionRun run_series(const FittedRule& rule, const PredictionProblem& problem) {
    PredictionRun run;
    run.mode = PredictionMode::Series;
    run.predictions.reserve(problem.test.size());

    double state = problem.train[problem.anchor].bid;
    const HourlyCurveSet* prev_curves = &problem.train[problem.anchor].curves;

    std::vector<HourlyCurveSet> history;
    if (needs_history(rule.kind)) {
        history.reserve(problem.anchor + 1 + problem.test.size());
        for (std::size_t i = 0; i <= problem.anchor; ++i)
            history.push_back(problem.train[i].curves);
    }

    for (std::size_t k = 0; k < problem.test.size(); ++k) {
        const double pred = advance(rule, state, *prev_curves, history);
        run.predictions.push_back(pred);
        state = pred;
        prev_curves = &problem.test[k].curves;
        if (needs_history(rule.kind)) history.push_back(problem.test[k].curves);
    }
    return run;
}

PredictionRun run_stepahead(RuleKind kind, const PredictionProblem& problem,
                            const RuleConfig& cfg, StepaheadValueCache* cache) {
    // BR depends only on the economic feedback, so refitting would be the
    // only difference from the series task; keep the train fit and the two
    // tasks coincide.
    if (kind == RuleKind::BR) {
        PredictionRun run = run_series(fit_rule(kind, problem.train, cfg), problem);
        run.mode = PredictionMode::Stepahead;
        return run;
    }
    if (cache && cache->by_step.size() < problem.test.size())
        cache->by_step.resize(problem.test.size(), std::numeric_limits<double>::quiet_NaN());

    PredictionRun run;
    run.mode = PredictionMode::Stepahead;
    run.predictions.reserve(problem.test.size());

    // All true data seen so far; grows by one hour per step.
    std::vector<HourRecord> seen(problem.train.begin(), problem.train.end());

    std::vector<HourlyCurveSet> history;
    if (needs_history(kind)) {
        history.reserve(problem.anchor + 1 + problem.test.size());
        for (std::size_t i = 0; i <= problem.anchor; ++i)
            history.push_back(problem.train[i].curves);
    }

    RuleConfig step_cfg = cfg;
    std::optional<double> frozen_value;
    if (!cfg.stepahead_refit_value && !cfg.fixed_value)
        frozen_value = estimate_values(problem.train, cfg.estimator).quantal;

    double state = problem.train[problem.anchor].bid;
    const HourlyCurveSet* prev_curves = &problem.train[problem.anchor].curves;

    for (std::size_t k = 0; k < problem.test.size(); ++k) {
        if (frozen_value) {
            step_cfg.fixed_value = frozen_value;
        } else if (cache && !cfg.fixed_value) {
            if (std::isnan(cache->by_step[k]))
                cache->by_step[k] = estimate_values(seen, cfg.estimator).quantal;
            step_cfg.fixed_value = cache->by_step[k];
        }
        const FittedRule rule = fit_rule(kind, seen, step_cfg);
        run.predictions.push_back(advance(rule, state, *prev_curves, history));

        seen.push_back(problem.test[k]);
        state = problem.test[k].bid; // true bid becomes the next state
        prev_curves = &problem.test[k].curves;
        if (needs_history(kind)) history.push_back(problem.test[k].curves);
    }
    return run;
}

} // namespace bidcast
