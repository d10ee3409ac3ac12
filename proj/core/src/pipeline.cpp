#include "bidcast/pipeline.hpp"

#include "bidcast/csv.hpp"
#include "bidcast/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace bidcast {

namespace {

using nlohmann::json;

void require_out_dir(const RunConfig& cfg) {
    if (!std::filesystem::is_directory(cfg.out))
        throw ConfigError("output directory does not exist: " + cfg.out.string());
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

std::string commented(const std::string& text) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) out << "# " << line << "\n";
    return out.str();
}

} // namespace

SimulateOutputs cmd_simulate(const RunConfig& cfg) {
    require_out_dir(cfg);
    SimulateOutputs res;
    res.raw_log = cfg.out / "raw_log.csv";
    res.ground_truth = cfg.out / "ground_truth.json";

    const auto bidders = make_bidders(cfg.market, cfg.population);
    CsvRawLogWriter writer(res.raw_log);
    const SimulationResult sim = generate_market(cfg.market, bidders, writer);
    res.n_rows = sim.n_rows;

    json truth;
    truth["seed"] = cfg.market.seed;
    truth["bidders"] = json::array();
    for (const auto& b : bidders) {
        json jb;
        jb["bidder_id"] = b.bidder_id;
        jb["value"] = b.value;
        jb["rule"] = std::string(rule_name(b.rule));
        jb["eta"] = b.eta;
        jb["beta"] = b.beta;
        if (b.vis) {
            jb["vis"] = {{"alpha", b.vis->alpha}, {"vis0", b.vis->vis0}, {"sign", b.vis->sign}};
        } else {
            jb["vis"] = nullptr;
        }
        jb["bid_noise_sd"] = b.bid_noise_sd;
        jb["base"] = {{"saturation", b.base_saturation},
                      {"half_sat", b.base_half_sat},
                      {"slope", b.base_slope}};
        jb["initial_bid"] = b.initial_bid;
        jb["won_top_slot"] = b.won_top_slot;
        truth["bidders"].push_back(std::move(jb));
    }
    open_out(res.ground_truth) << truth.dump(2) << "\n";
    return res;
}

PrepareOutputs cmd_prepare(const RunConfig& cfg) {
    require_out_dir(cfg);
    const std::filesystem::path input =
        cfg.prepare.input.empty() ? cfg.out / "raw_log.csv" : std::filesystem::path(cfg.prepare.input);

    std::uint64_t n_rows = 0;
    auto series = aggregate_hourly_file(input, &n_rows);

    // top-slot flags come from the simulator sidecar when present
    const std::filesystem::path truth_path = input.parent_path() / "ground_truth.json";
    std::map<std::string, bool> top_slot;
    if (std::filesystem::exists(truth_path)) {
        std::ifstream in(truth_path);
        json truth = json::parse(in);
        for (const auto& jb : truth.at("bidders"))
            top_slot[jb.at("bidder_id").get<std::string>()] = jb.at("won_top_slot").get<bool>();
    }
    for (auto& s : series) {
        const auto it = top_slot.find(s.bidder_id);
        s.won_top_slot = it == top_slot.end() ? true : it->second;
    }

    std::uint64_t dropped_short = 0;
    std::uint64_t dropped_hours = 0;
    std::vector<BidderSeries> split_ok;
    for (auto& s : series) {
        dropped_hours += s.meta.n_dropped_hours;
        try {
            split_train_test(s);
            split_ok.push_back(std::move(s));
        } catch (const TooShort&) {
            ++dropped_short;
        }
    }

    FilterCounts counts;
    FilterConfig filter_cfg;
    filter_cfg.min_hours = cfg.prepare.min_hours;
    auto kept = filter_bidders(std::move(split_ok), filter_cfg, &counts);

    std::vector<ShiftInstance> instances;
    if (cfg.prepare.build_shift) instances = build_shift_dataset(kept, cfg.prepare.shift);

    PrepareOutputs res;
    res.dataset = cfg.out / "dataset.csv";
    res.manifest = cfg.out / "manifest.json";
    res.n_bidders = kept.size();
    res.n_shift_instances = instances.size();
    write_dataset_csv(res.dataset, kept);

    json manifest;
    manifest["n_raw_rows"] = n_rows;
    manifest["dropped_short_series"] = dropped_short;
    manifest["dropped_degenerate_hours"] = dropped_hours;
    manifest["filters"] = {{"too_few_hours", counts.too_few_hours},
                           {"no_top_slot", counts.no_top_slot},
                           {"nonpositive_bids", counts.nonpositive_bids},
                           {"zero_variance", counts.zero_variance},
                           {"kept", counts.kept}};
    manifest["bidders"] = json::array();
    for (const auto& s : kept) {
        manifest["bidders"].push_back({{"id", s.bidder_id},
                                       {"n_hours", s.hours.size()},
                                       {"train_end", s.train_end}});
    }
    manifest["shift_instances"] = json::array();
    for (const auto& inst : instances) {
        manifest["shift_instances"].push_back({{"bidder", inst.bidder_id},
                                               {"day", inst.day},
                                               {"ks_p", inst.ks_p},
                                               {"t_p", inst.t_p}});
    }
    open_out(res.manifest) << manifest.dump(2) << "\n";
    return res;
}

std::vector<BidderSeries> load_prepared(const RunConfig& cfg) {
    return read_dataset_csv(cfg.out / "dataset.csv");
}

namespace {

void write_scores_csv(const std::filesystem::path& path, const EvalReport& report) {
    auto out = open_out(path);
    out << "bidder_id,method,mode,mape,n_test\n";
    for (const auto& s : report.scores) {
        out << s.unit_id << ',' << s.method << ',' << mode_name(s.mode) << ','
            << format_double(s.mape) << ',' << s.n_test << "\n";
    }
}

void write_predictions_csv(const std::filesystem::path& path, const EvalReport& report) {
    auto out = open_out(path);
    out << "bidder_id,hour,mode,rule,predicted_bid,true_bid\n";
    for (const auto& p : report.predictions) {
        out << p.unit_id << ',' << p.hour << ',' << mode_name(p.mode) << ',' << p.method << ','
            << format_double(p.predicted) << ',' << format_double(p.truth) << "\n";
    }
}

void write_estimates_csv(const std::filesystem::path& path, const EvalReport& report) {
    auto out = open_out(path);
    out << "bidder_id,v_qr,v_mr,shade_ratio,daily_cv,ogd_plausibility,eligible_flag\n";
    for (const auto& e : report.estimates) {
        out << e.unit_id << ',' << format_double(e.v_qr) << ',' << format_double(e.v_mr) << ','
            << format_double(e.shade) << ',' << format_double(e.daily_cv) << ','
            << format_double(e.plausibility) << ',' << (e.eligible ? 1 : 0) << "\n";
    }
}

void write_failures_csv(const std::filesystem::path& path, const EvalReport& report) {
    auto out = open_out(path);
    out << "bidder_id,method,mode,reason\n";
    for (const auto& f : report.failures) {
        std::string reason = f.reason;
        std::replace(reason.begin(), reason.end(), ',', ';');
        out << f.unit_id << ',' << f.method << ',' << f.mode << ',' << reason << "\n";
    }
}

void write_summary_csv(const std::filesystem::path& path, const EvalReport& report,
                       const std::string& echo) {
    auto out = open_out(path);
    out << commented(echo);
    out << "method,mode,mean,stderr,lb,ub,median,q1,q3,whisker_lo,whisker_hi,n,n_outliers\n";
    for (const auto& row : report.tables) {
        const DistStats& d = row.stats;
        out << row.method << ',' << mode_name(row.mode) << ',' << format_double(d.mean_excl)
            << ',' << format_double(d.stderr_mean) << ',' << format_double(d.ci_lo) << ','
            << format_double(d.ci_hi) << ',' << format_double(d.median) << ','
            << format_double(d.q1) << ',' << format_double(d.q3) << ','
            << format_double(d.whisker_lo) << ',' << format_double(d.whisker_hi) << ',' << d.n
            << ',' << d.n_outliers << "\n";
    }
}

void write_summary_md(const std::filesystem::path& path, const EvalReport& report,
                      const std::string& echo) {
    auto out = open_out(path);
    out << "# Evaluation summary\n\n";
    for (PredictionMode mode : {PredictionMode::Series, PredictionMode::Stepahead}) {
        bool any = false;
        for (const auto& row : report.tables) any = any || row.mode == mode;
        if (!any) continue;
        out << "## " << mode_name(mode) << " prediction\n\n";
        out << "| method | mean | stderr | lb | ub | median | n | outliers |\n";
        out << "|---|---|---|---|---|---|---|---|\n";
        for (const auto& row : report.tables) {
            if (row.mode != mode) continue;
            const DistStats& d = row.stats;
            char buf[160];
            std::snprintf(buf, sizeof(buf), "| %s | %.4f | %.4f | %.4f | %.4f | %.4f | %zu | %zu |",
                          row.method.c_str(), d.mean_excl, d.stderr_mean, d.ci_lo, d.ci_hi,
                          d.median, d.n, d.n_outliers);
            out << buf << "\n";
        }
        out << "\n";
    }
    out << "## Effective configuration\n\n```\n" << echo << "```\n";
}

void write_profile_csv(const std::filesystem::path& path, const HourlyProfile& p) {
    auto out = open_out(path);
    out << "hour_of_day,mean,p25,p75\n";
    for (std::size_t h = 0; h < 24; ++h) {
        out << h << ',' << format_double(p.mean[h]) << ',' << format_double(p.p25[h]) << ','
            << format_double(p.p75[h]) << "\n";
    }
}

void write_ogdbias_params_csv(const std::filesystem::path& path, const EvalReport& report) {
    auto out = open_out(path);
    out << "param,value,count\n";
    std::map<double, int> alpha_counts, vis0_counts;
    for (const auto& row : report.ogdbias_params) {
        ++alpha_counts[row.alpha];
        ++vis0_counts[row.vis0];
    }
    for (const auto& [v, c] : alpha_counts)
        out << "alpha," << format_double(v) << ',' << c << "\n";
    for (const auto& [v, c] : vis0_counts)
        out << "vis0," << format_double(v) << ',' << c << "\n";
}

} // namespace

RunOutputs cmd_run(const RunConfig& cfg) {
    require_out_dir(cfg);
    const auto series = load_prepared(cfg);
    if (series.empty()) throw IoError("prepared dataset is empty");

    std::vector<EvalUnit> units;
    if (cfg.run.use_shift) {
        const auto instances = build_shift_dataset(series, cfg.prepare.shift);
        units = make_shift_units(series, instances);
        if (units.empty()) throw IoError("no covariate-shift instances qualified");
    } else {
        units = make_insample_units(series);
    }

    ExperimentConfig exp;
    exp.methods = parse_methods(cfg.run.methods);
    exp.modes = cfg.run.modes;
    exp.rule = cfg.rule;
    exp.baseline = cfg.baseline;
    exp.seed = cfg.run.seed;
    exp.jobs = cfg.run.jobs;
    exp.collect_predictions = cfg.run.predictions;

    RunOutputs res;
    res.report = run_experiment(units, exp);

    const std::string echo = config_echo(cfg);
    res.scores = cfg.out / "scores.csv";
    res.summary_csv = cfg.out / "summary.csv";
    res.summary_md = cfg.out / "summary.md";
    write_scores_csv(res.scores, res.report);
    if (cfg.run.predictions) write_predictions_csv(cfg.out / "predictions.csv", res.report);
    write_estimates_csv(cfg.out / "estimates.csv", res.report);
    write_failures_csv(cfg.out / "failures.csv", res.report);
    write_summary_csv(res.summary_csv, res.report, echo);
    write_summary_md(res.summary_md, res.report, echo);
    if (res.report.profile) write_profile_csv(cfg.out / "hourly_profile.csv", *res.report.profile);
    if (!res.report.ogdbias_params.empty())
        write_ogdbias_params_csv(cfg.out / "ogdbias_params.csv", res.report);
    return res;
}

void cmd_report(const RunConfig& cfg) {
    require_out_dir(cfg);
    const std::filesystem::path scores_path = cfg.out / "scores.csv";
    std::ifstream in(scores_path);
    if (!in) throw IoError("cannot open " + scores_path.string());

    EvalReport report;
    std::string line;
    std::size_t line_no = 0;
    std::map<std::pair<std::string, int>, std::vector<double>> grouped;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 || line.empty()) continue;
        std::istringstream row(line);
        std::string id, method, mode_str, mape_str, n_str;
        std::getline(row, id, ',');
        std::getline(row, method, ',');
        std::getline(row, mode_str, ',');
        std::getline(row, mape_str, ',');
        std::getline(row, n_str, ',');
        const auto mode = mode_from_name(mode_str);
        if (!mode) throw IoError("scores.csv row " + std::to_string(line_no) + ": bad mode");
        grouped[{method, static_cast<int>(*mode)}].push_back(std::stod(mape_str));
    }
    for (auto& [key, scores] : grouped) {
        if (scores.size() < 4) continue;
        SummaryRow row;
        row.method = key.first;
        row.mode = static_cast<PredictionMode>(key.second);
        row.stats = dist_stats(std::move(scores));
        report.tables.push_back(std::move(row));
    }
    std::sort(report.tables.begin(), report.tables.end(),
              [](const SummaryRow& a, const SummaryRow& b) {
                  if (a.mode != b.mode) return a.mode < b.mode;
                  return a.stats.mean_excl != b.stats.mean_excl
                             ? a.stats.mean_excl < b.stats.mean_excl
                             : a.method < b.method;
              });

    const std::string echo = config_echo(cfg);
    write_summary_csv(cfg.out / "summary.csv", report, echo);
    write_summary_md(cfg.out / "summary.md", report, echo);
}

} // namespace bidcast
