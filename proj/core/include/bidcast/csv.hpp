#pragma once

#include "bidcast/series.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace bidcast {

// One counterfactual point of the raw auction log. The log schema is
//   bidder_id, timestamp_hour, auction_id, multiplier, bid, click_prob, cpc
// with one row per (auction, multiplier).
struct RawRow {
    std::string bidder_id;
    std::int64_t hour = 0;
    std::int64_t auction_id = 0;
    double multiplier = 1.0;
    double bid = 0.0;
    double click_prob = 0.0;
    double cpc = 0.0;
};

class RowSink {
public:
    virtual ~RowSink() = default;
    virtual void consume(const RawRow& row) = 0;
};

class VectorSink final : public RowSink {
public:
    void consume(const RawRow& row) override { rows.push_back(row); }
    std::vector<RawRow> rows;
};

// Streams rows straight to disk; doubles are written in shortest
// round-trip form so re-ingestion is exact.
class CsvRawLogWriter final : public RowSink {
public:
    explicit CsvRawLogWriter(const std::filesystem::path& path);
    void consume(const RawRow& row) override;
    std::uint64_t rows_written() const { return n_; }

private:
    std::ofstream out_;
    std::string buf_;
    std::uint64_t n_ = 0;
};

// Reads a raw log; throws IoError naming the offending row on malformed input.
std::vector<RawRow> read_raw_log(const std::filesystem::path& path);

// Streaming variant: invokes `fn` per row, reusing one RawRow buffer.
void for_each_raw_row(const std::filesystem::path& path,
                      const std::function<void(const RawRow&)>& fn);

// Prepared per-hour dataset (fitted curves + mean bids), one row per
// bidder-hour:
//   bidder_id, hour, mean_bid, click_saturation, click_half_sat, cost_slope, n_auctions
void write_dataset_csv(const std::filesystem::path& path,
                       std::span<const BidderSeries> series);
std::vector<BidderSeries> read_dataset_csv(const std::filesystem::path& path);

// shortest round-trip decimal representation
std::string format_double(double x);

} // namespace bidcast
