#pragma once

#include "bidcast/config.hpp"
#include "bidcast/evaluation.hpp"

#include <filesystem>

namespace bidcast {

struct SimulateOutputs {
    std::filesystem::path raw_log;
    std::filesystem::path ground_truth;
    std::uint64_t n_rows = 0;
};

// simulate: write <out>/raw_log.csv and <out>/ground_truth.json.
SimulateOutputs cmd_simulate(const RunConfig& cfg);

struct PrepareOutputs {
    std::filesystem::path dataset;
    std::filesystem::path manifest;
    std::size_t n_bidders = 0;
    std::size_t n_shift_instances = 0;
};

// prepare: aggregate the raw log by hour, filter, split, optionally build the
// covariate-shift instances; writes <out>/dataset.csv and <out>/manifest.json.
PrepareOutputs cmd_prepare(const RunConfig& cfg);

struct RunOutputs {
    std::filesystem::path scores;
    std::filesystem::path summary_csv;
    std::filesystem::path summary_md;
    EvalReport report;
};

// run: evaluate the configured methods and modes over the prepared dataset;
// writes scores.csv, predictions.csv, estimates.csv, summary.csv/.md,
// failures.csv and the figure-data CSVs.
RunOutputs cmd_run(const RunConfig& cfg);

// report: rebuild the summary tables from an existing scores.csv.
void cmd_report(const RunConfig& cfg);

// Loads the prepared series (helper shared by cmd_run and tests).
std::vector<BidderSeries> load_prepared(const RunConfig& cfg);

} // namespace bidcast
