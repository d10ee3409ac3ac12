#pragma once

#include "bidcast/curves.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bidcast {

// One hour of a bidder's life: the average bid placed and the fitted curves.
struct HourRecord {
    std::int64_t hour = 0;
    double bid = 0.0;
    HourlyCurveSet curves;
};

struct SeriesMeta {
    std::uint64_t n_raw_auctions = 0;
    std::uint64_t n_dropped_hours = 0; // degenerate curve fits
};

// A bidder's hourly series with the train/test split marker.
// Invariants: hours strictly increasing; train_end in (0, size).
struct BidderSeries {
    std::string bidder_id;
    std::vector<HourRecord> hours;
    std::size_t train_end = 0;
    bool won_top_slot = false;
    SeriesMeta meta;

    std::span<const HourRecord> train() const {
        return {hours.data(), train_end};
    }
    std::span<const HourRecord> test() const {
        return {hours.data() + train_end, hours.size() - train_end};
    }
};

// A forecasting task: predict the bids of `test` given `train`. `anchor` is
// the index in `train` of the hour immediately preceding the test window; for
// a plain chronological split it is train.size()-1, while covariate-shift
// instances pool night hours from the whole period and anchor mid-train.
struct PredictionProblem {
    std::span<const HourRecord> train;
    std::span<const HourRecord> test;
    std::size_t anchor = 0;

    static PredictionProblem from(const BidderSeries& s) {
        return {s.train(), s.test(), s.train_end - 1};
    }
};

inline double mean_bid(std::span<const HourRecord> hours) {
    double s = 0.0;
    for (const auto& h : hours) s += h.bid;
    return hours.empty() ? 0.0 : s / static_cast<double>(hours.size());
}

} // namespace bidcast
