#pragma once

#include "bidcast/csv.hpp"
#include "bidcast/series.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bidcast {

// Per bidder-hour: the mean of the bids actually placed, plus curves fitted
// to the pooled multiplier points of every auction in the hour. Hours whose
// click fit is degenerate are dropped and counted.
std::vector<BidderSeries> aggregate_hourly(std::span<const RawRow> rows);

// Streams a raw log file through the same aggregation without materializing
// the rows.
std::vector<BidderSeries> aggregate_hourly_file(const std::filesystem::path& path,
                                                std::uint64_t* n_rows = nullptr);

// Sets train_end = floor(0.9 * length); throws TooShort below 10 hours.
void split_train_test(BidderSeries& series);

struct FilterCounts {
    std::uint64_t too_few_hours = 0;
    std::uint64_t no_top_slot = 0;
    std::uint64_t nonpositive_bids = 0;
    std::uint64_t zero_variance = 0;
    std::uint64_t kept = 0;
};

struct FilterConfig {
    std::size_t min_hours = 100;
};

// Keeps bidders with enough active hours, a top-slot win, strictly positive
// bids, and nonzero bid variance in both train and test. Bidders are counted
// under the first filter they fail, in that order. train_end must be set.
std::vector<BidderSeries> filter_bidders(std::vector<BidderSeries> series,
                                         const FilterConfig& cfg, FilterCounts* counts);

struct ShiftConfig {
    double ks_p_max = 0.001;
    double t_p_max = 0.05;
    double cv_min = 0.1;
    int day_start_hod = 10; // test window 10:00-21:59
    int day_end_hod = 21;
};

// One qualifying covariate-shift instance: a full-activity day whose daytime
// bids differ from the bidder's pooled night bids (KS) and sit significantly
// above them (one direction of a Welch two-sided test).
struct ShiftInstance {
    std::string bidder_id;
    std::int64_t day = 0;
    std::vector<std::size_t> night_idx;    // indices into the bidder's hours, chronological
    std::array<std::size_t, 12> day_idx{}; // the test hours
    std::size_t anchor_in_night = 0;       // position of the test day's 9:00 hour
    double ks_p = 1.0;
    double t_p = 1.0;
};

std::vector<ShiftInstance> build_shift_dataset(std::span<const BidderSeries> series,
                                               const ShiftConfig& cfg = {});

// The test day's 24 bids ordered by hour of day.
std::array<double, 24> day_bids_of(const BidderSeries& series, const ShiftInstance& inst);

// An evaluation unit owning its hour storage: either a bidder's chronological
// train/test split or a materialized shift instance (train = pooled nights,
// anchored at the hour before the test window).
struct EvalUnit {
    std::string id;
    std::vector<HourRecord> train;
    std::vector<HourRecord> test;
    std::size_t anchor = 0;
    std::array<double, 24> day_profile{};
    bool has_day_profile = false;

    PredictionProblem problem() const { return {train, test, anchor}; }
};

std::vector<EvalUnit> make_insample_units(std::span<const BidderSeries> series);
std::vector<EvalUnit> make_shift_units(std::span<const BidderSeries> series,
                                       std::span<const ShiftInstance> instances);

} // namespace bidcast
