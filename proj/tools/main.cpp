// bidcast: simulate sponsored-search markets, estimate bidder values by
// regret minimization, and evaluate learning-rule and ML bid forecasters.

#include "bidcast/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out = ".";
    std::int64_t seed = -1;
    std::string methods;
    std::string modes;
    bool shift = false;
    int jobs = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "configuration file (sectioned key=value)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", flags.out, "working directory for inputs and outputs");
    cmd->add_option("--seed", flags.seed, "override both the simulate and run seeds");
    cmd->add_option("--methods", flags.methods, "comma-separated method list or 'all'");
    cmd->add_option("--modes", flags.modes, "series,stepahead");
    cmd->add_flag("--shift", flags.shift,
                  "day/night covariate-shift pipeline (simulate, prepare and evaluate)");
    cmd->add_option("--jobs", flags.jobs, "worker threads (0 = all cores)");
}

bidcast::RunConfig build_config(const CommonFlags& flags) {
    bidcast::RunConfig cfg;
    if (!flags.config_path.empty()) cfg = bidcast::load_config(flags.config_path);
    cfg.out = flags.out;
    if (flags.seed >= 0) {
        cfg.market.seed = static_cast<std::uint64_t>(flags.seed);
        cfg.run.seed = static_cast<std::uint64_t>(flags.seed);
    }
    if (!flags.methods.empty()) cfg.run.methods = flags.methods;
    if (!flags.modes.empty())
        bidcast::apply_override(cfg, "run.modes", flags.modes);
    if (flags.shift) {
        cfg.market.shift = bidcast::ShiftScenario::DayNight;
        cfg.prepare.build_shift = true;
        cfg.run.use_shift = true;
    }
    if (flags.jobs >= 0) cfg.run.jobs = flags.jobs;
    bidcast::validate(cfg);
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"no-regret bid prediction for repeated sponsored-search auctions"};
    app.require_subcommand(1);

    CommonFlags flags;
    CLI::App* sim = app.add_subcommand("simulate", "generate a synthetic market log");
    CLI::App* prep = app.add_subcommand("prepare", "aggregate, filter and split a raw log");
    CLI::App* run = app.add_subcommand("run", "fit, predict and evaluate all methods");
    CLI::App* rep = app.add_subcommand("report", "rebuild summary tables from scores.csv");
    for (CLI::App* cmd : {sim, prep, run, rep}) add_common(cmd, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2; // usage errors
    }

    try {
        const bidcast::RunConfig cfg = build_config(flags);
        if (sim->parsed()) {
            const auto out = bidcast::cmd_simulate(cfg);
            std::cout << "wrote " << out.raw_log.string() << " (" << out.n_rows << " rows) and "
                      << out.ground_truth.string() << "\n";
        } else if (prep->parsed()) {
            const auto out = bidcast::cmd_prepare(cfg);
            std::cout << "wrote " << out.dataset.string() << " (" << out.n_bidders
                      << " bidders) and " << out.manifest.string();
            if (cfg.prepare.build_shift)
                std::cout << " with " << out.n_shift_instances << " shift instances";
            std::cout << "\n";
        } else if (run->parsed()) {
            const auto out = bidcast::cmd_run(cfg);
            std::cout << "wrote " << out.scores.string() << ", " << out.summary_csv.string()
                      << ", " << out.summary_md.string() << "\n";
            for (const auto& row : out.report.tables) {
                std::printf("%-12s %-9s mean %.4f  [%.4f, %.4f]\n", row.method.c_str(),
                            std::string(bidcast::mode_name(row.mode)).c_str(),
                            row.stats.mean_excl, row.stats.ci_lo, row.stats.ci_hi);
            }
            if (!out.report.failures.empty())
                std::cout << out.report.failures.size()
                          << " per-bidder failures recorded in failures.csv\n";
        } else if (rep->parsed()) {
            bidcast::cmd_report(cfg);
            std::cout << "rebuilt " << (cfg.out / "summary.csv").string() << " and "
                      << (cfg.out / "summary.md").string() << "\n";
        }
    } catch (const bidcast::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
