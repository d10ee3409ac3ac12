#pragma once

#include "bidcast/dataset.hpp"
#include "bidcast/errors.hpp"
#include "bidcast/evaluation.hpp"
#include "bidcast/simulator.hpp"

#include <filesystem>
#include <string>

namespace bidcast {

struct PrepareConfig {
    std::size_t min_hours = 100;
    bool build_shift = false;
    ShiftConfig shift;
    std::string input; // raw log path; defaults to <out>/raw_log.csv
};

struct RunSection {
    std::uint64_t seed = 0;
    std::string methods = "all";
    std::vector<PredictionMode> modes = {PredictionMode::Series, PredictionMode::Stepahead};
    bool use_shift = false; // evaluate shift instances instead of the chronological split
    int jobs = 0;           // 0 = hardware concurrency
    bool predictions = true;
};

// The whole pipeline configuration: a sectioned key=value file with strict
// (unknown keys rejected) parsing; command-line flags override single fields.
struct RunConfig {
    MarketConfig market;
    PopulationConfig population;
    PrepareConfig prepare;
    RuleConfig rule;
    BaselineConfig baseline;
    RunSection run;
    std::filesystem::path out = ".";
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

// key must be "section.key"; value in the same syntax as the file.
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

void validate(const RunConfig& cfg);

// Canonical INI rendering of the effective configuration; embedded in report
// headers for provenance.
std::string config_echo(const RunConfig& cfg);

} // namespace bidcast
