#include "bidcast/evaluation.hpp"

#include "bidcast/errors.hpp"
#include "bidcast/rng.hpp"
#include "bidcast/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace bidcast {

double mape(std::span<const double> truth, std::span<const double> predicted) {
    if (truth.empty() || truth.size() != predicted.size())
        throw EmptySeries("mape: length mismatch or empty input");
    double s = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] <= 0.0) throw ZeroTrueBid("mape: true bid must be positive");
        s += std::fabs(truth[i] - predicted[i]) / truth[i];
    }
    return s / static_cast<double>(truth.size());
}

DistStats dist_stats(std::vector<double> scores) {
    if (scores.size() < 4) throw TooFewScores("dist_stats: need at least 4 scores");
    std::sort(scores.begin(), scores.end());

    DistStats d;
    d.n = scores.size();
    d.q1 = stats::quantile_sorted(scores, 0.25);
    d.median = stats::quantile_sorted(scores, 0.50);
    d.q3 = stats::quantile_sorted(scores, 0.75);
    const double iqr = d.q3 - d.q1;
    const double lo_fence = d.q1 - 1.5 * iqr;
    const double hi_fence = d.q3 + 1.5 * iqr;

    std::vector<double> kept;
    kept.reserve(scores.size());
    d.whisker_lo = scores.back();
    d.whisker_hi = scores.front();
    for (double x : scores) {
        if (x < lo_fence || x > hi_fence) continue;
        kept.push_back(x);
        d.whisker_lo = std::min(d.whisker_lo, x);
        d.whisker_hi = std::max(d.whisker_hi, x);
    }
    d.n_outliers = scores.size() - kept.size();
    d.mean_excl = stats::mean(kept);
    d.stderr_mean = kept.size() > 1
                        ? stats::sample_stddev(kept) / std::sqrt(static_cast<double>(kept.size()))
                        : 0.0;
    d.ci_lo = d.mean_excl - 1.96 * d.stderr_mean;
    d.ci_hi = d.mean_excl + 1.96 * d.stderr_mean;
    return d;
}

HourlyProfile hourly_profile(std::span<const std::array<double, 24>> day_bids) {
    if (day_bids.empty()) throw EmptySeries("hourly_profile: no instances");
    HourlyProfile p;
    p.n_instances = day_bids.size();
    std::array<std::vector<double>, 24> normalized;
    for (const auto& day : day_bids) {
        double m = 0.0;
        for (double b : day) m += b;
        m /= 24.0;
        for (std::size_t h = 0; h < 24; ++h) normalized[h].push_back(day[h] / m);
    }
    for (std::size_t h = 0; h < 24; ++h) {
        auto& xs = normalized[h];
        p.mean[h] = stats::mean(xs);
        std::sort(xs.begin(), xs.end());
        p.p25[h] = stats::quantile_sorted(xs, 0.25);
        p.p75[h] = stats::quantile_sorted(xs, 0.75);
    }
    return p;
}

// ------------------------------------------------------------------ runner

std::string_view mode_name(PredictionMode mode) {
    return mode == PredictionMode::Series ? "series" : "stepahead";
}

std::optional<PredictionMode> mode_from_name(std::string_view name) {
    if (name == "series") return PredictionMode::Series;
    if (name == "stepahead") return PredictionMode::Stepahead;
    return std::nullopt;
}

namespace {

MethodSpec rule_method(RuleKind kind) {
    MethodSpec m;
    m.name = std::string(rule_name(kind));
    m.is_rule = true;
    m.rule = kind;
    return m;
}

MethodSpec baseline_method(BaselineKind kind, bool econ) {
    MethodSpec m;
    m.name = std::string(baseline_name(kind, econ));
    m.is_rule = false;
    m.baseline = kind;
    m.use_econ = econ;
    return m;
}

std::vector<MethodSpec> all_methods() {
    std::vector<MethodSpec> out;
    for (RuleKind k : {RuleKind::BR, RuleKind::MomentumBR, RuleKind::OGD, RuleKind::BRReg,
                       RuleKind::FTRL, RuleKind::FTL, RuleKind::OGDBias})
        out.push_back(rule_method(k));
    out.push_back(baseline_method(BaselineKind::AR2, false));
    out.push_back(baseline_method(BaselineKind::RF2, false));
    out.push_back(baseline_method(BaselineKind::MLP2, false));
    out.push_back(baseline_method(BaselineKind::SeasonalMean, false));
    return out;
}

} // namespace

std::vector<MethodSpec> parse_methods(const std::string& spec) {
    if (spec == "all" || spec.empty()) return all_methods();

    std::vector<MethodSpec> out;
    std::size_t start = 0;
    while (start <= spec.size()) {
        std::size_t comma = spec.find(',', start);
        if (comma == std::string::npos) comma = spec.size();
        std::string name = spec.substr(start, comma - start);
        start = comma + 1;
        // trim
        while (!name.empty() && name.front() == ' ') name.erase(name.begin());
        while (!name.empty() && name.back() == ' ') name.pop_back();
        if (name.empty()) continue;

        if (auto rk = rule_from_name(name)) {
            out.push_back(rule_method(*rk));
            continue;
        }
        bool matched = false;
        for (BaselineKind bk : {BaselineKind::AR2, BaselineKind::RF2, BaselineKind::MLP2,
                                BaselineKind::SeasonalMean}) {
            for (bool econ : {false, true}) {
                if (!matched && name == baseline_name(bk, econ)) {
                    out.push_back(baseline_method(bk, econ));
                    matched = true;
                }
            }
        }
        if (!matched) throw ConfigError("unknown method '" + name + "'");
    }
    if (out.empty()) throw ConfigError("empty method list");
    return out;
}

namespace {

struct UnitResult {
    std::vector<ScoreRow> scores;
    std::vector<PredictionRow> predictions;
    std::vector<FailureRow> failures;
    std::vector<EstimateRow> estimates;
    std::vector<OgdBiasParamRow> ogdbias_params;
};

UnitResult evaluate_unit(const EvalUnit& unit, std::size_t unit_index,
                         const ExperimentConfig& cfg) {
    UnitResult res;
    const PredictionProblem problem = unit.problem();
    StepaheadValueCache value_cache;

    std::vector<double> truth;
    truth.reserve(problem.test.size());
    for (const auto& h : problem.test) truth.push_back(h.bid);

    if (cfg.collect_estimates) {
        try {
            const ValueEstimates est = estimate_values(problem.train, cfg.rule.estimator);
            EstimateRow row;
            row.unit_id = unit.id;
            row.v_qr = est.quantal;
            row.v_mr = est.min_regret;
            row.shade = shade_ratio(problem.train, est.quantal);
            try {
                row.daily_cv = daily_value_cv(problem.train, cfg.rule.estimator);
            } catch (const Error&) {
                row.daily_cv = std::numeric_limits<double>::quiet_NaN();
            }
            try {
                const PlausibilityResult pl = ogd_plausibility(problem.train, est.quantal);
                row.plausibility = pl.signed_neg_log10_p;
                row.eligible = pl.eligible;
            } catch (const Error&) {
                row.plausibility = std::numeric_limits<double>::quiet_NaN();
            }
            res.estimates.push_back(std::move(row));
        } catch (const Error& e) {
            res.failures.push_back({unit.id, "estimates", "-", e.what()});
        }
    }

    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        const MethodSpec& method = cfg.methods[mi];
        const std::uint64_t seed = mix_seed(cfg.seed, unit_index * 1024 + mi);

        // both modes start from the same train fit; do it once
        FittedBaselineModel prefit;
        bool have_prefit = false;
        std::string prefit_error;
        if (!method.is_rule && method.baseline != BaselineKind::SeasonalMean) {
            try {
                prefit = fit_baseline_model(method.baseline,
                                            training_rows(problem.train, method.use_econ),
                                            cfg.baseline, seed);
                have_prefit = true;
            } catch (const Error& e) {
                prefit_error = e.what();
            }
        }

        for (PredictionMode mode : cfg.modes) {
            try {
                PredictionRun run;
                if (method.is_rule) {
                    if (mode == PredictionMode::Series) {
                        const FittedRule rule = fit_rule(method.rule, problem.train, cfg.rule);
                        if (method.rule == RuleKind::OGDBias)
                            res.ogdbias_params.push_back({unit.id, rule.vis.alpha, rule.vis.vis0});
                        run = run_series(rule, problem);
                    } else {
                        run = run_stepahead(method.rule, problem, cfg.rule, &value_cache);
                    }
                } else if (method.baseline != BaselineKind::SeasonalMean && !have_prefit) {
                    throw TooFewRows(prefit_error);
                } else {
                    run = predict_baseline(method.baseline, mode, problem, method.use_econ,
                                           cfg.baseline, seed,
                                           have_prefit ? &prefit : nullptr);
                }
                const double score = mape(truth, run.predictions);
                res.scores.push_back({unit.id, method.name, mode, score, truth.size()});
                if (cfg.collect_predictions) {
                    for (std::size_t k = 0; k < run.predictions.size(); ++k) {
                        res.predictions.push_back({unit.id, problem.test[k].hour, mode,
                                                   method.name, run.predictions[k], truth[k]});
                    }
                }
            } catch (const Error& e) {
                res.failures.push_back(
                    {unit.id, method.name, std::string(mode_name(mode)), e.what()});
            }
        }
    }
    return res;
}

} // namespace

const SummaryRow* EvalReport::find(const std::string& method, PredictionMode mode) const {
    for (const auto& row : tables)
        if (row.method == method && row.mode == mode) return &row;
    return nullptr;
}

EvalReport run_experiment(std::span<const EvalUnit> units, const ExperimentConfig& cfg) {
    std::vector<UnitResult> results(units.size());

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned jobs =
        cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs) : std::min<unsigned>(hw, 16);
    if (jobs <= 1 || units.size() <= 1) {
        for (std::size_t i = 0; i < units.size(); ++i)
            results[i] = evaluate_unit(units[i], i, cfg);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        workers.reserve(jobs);
        for (unsigned w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= units.size()) return;
                    results[i] = evaluate_unit(units[i], i, cfg);
                }
            });
        }
        for (auto& t : workers) t.join();
    }

    EvalReport report;
    for (auto& r : results) {
        report.scores.insert(report.scores.end(), r.scores.begin(), r.scores.end());
        report.predictions.insert(report.predictions.end(), r.predictions.begin(),
                                  r.predictions.end());
        report.failures.insert(report.failures.end(), r.failures.begin(), r.failures.end());
        report.estimates.insert(report.estimates.end(), r.estimates.begin(), r.estimates.end());
        report.ogdbias_params.insert(report.ogdbias_params.end(), r.ogdbias_params.begin(),
                                     r.ogdbias_params.end());
    }

    for (PredictionMode mode : cfg.modes) {
        std::vector<SummaryRow> rows;
        for (const auto& method : cfg.methods) {
            std::vector<double> scores;
            for (const auto& s : report.scores)
                if (s.method == method.name && s.mode == mode) scores.push_back(s.mape);
            if (scores.size() < 4) continue;
            SummaryRow row;
            row.method = method.name;
            row.mode = mode;
            row.stats = dist_stats(std::move(scores));
            rows.push_back(std::move(row));
        }
        std::sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
            return a.stats.mean_excl != b.stats.mean_excl ? a.stats.mean_excl < b.stats.mean_excl
                                                          : a.method < b.method;
        });
        report.tables.insert(report.tables.end(), rows.begin(), rows.end());
    }

    std::vector<std::array<double, 24>> profiles;
    for (const auto& u : units)
        if (u.has_day_profile) profiles.push_back(u.day_profile);
    if (!profiles.empty()) report.profile = hourly_profile(profiles);

    return report;
}

} // namespace bidcast
