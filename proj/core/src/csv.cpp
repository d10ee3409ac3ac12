#include "bidcast/csv.hpp"

#include "bidcast/errors.hpp"

#include <charconv>
#include <cstdio>
#include <map>

namespace bidcast {

std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace {

void append_double(std::string& s, double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    s.append(buf, res.ptr);
}

void append_int(std::string& s, std::int64_t x) {
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    s.append(buf, res.ptr);
}

struct FieldReader {
    const char* p;
    const char* end;
    std::size_t line_no;

    std::string_view next() {
        const char* start = p;
        while (p < end && *p != ',') ++p;
        std::string_view f(start, static_cast<std::size_t>(p - start));
        if (p < end) ++p; // skip comma
        return f;
    }

    double next_double() {
        const auto f = next();
        double v = 0.0;
        const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
        if (res.ec != std::errc{} || res.ptr != f.data() + f.size())
            throw IoError("csv row " + std::to_string(line_no) + ": bad number '" +
                          std::string(f) + "'");
        return v;
    }

    std::int64_t next_int() {
        const auto f = next();
        std::int64_t v = 0;
        const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
        if (res.ec != std::errc{} || res.ptr != f.data() + f.size())
            throw IoError("csv row " + std::to_string(line_no) + ": bad integer '" +
                          std::string(f) + "'");
        return v;
    }

    bool done() const { return p >= end; }
};

} // namespace

CsvRawLogWriter::CsvRawLogWriter(const std::filesystem::path& path) : out_(path) {
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
    out_ << "bidder_id,timestamp_hour,auction_id,multiplier,bid,click_prob,cpc\n";
    buf_.reserve(160);
}

void CsvRawLogWriter::consume(const RawRow& row) {
    buf_.clear();
    buf_ += row.bidder_id;
    buf_ += ',';
    append_int(buf_, row.hour);
    buf_ += ',';
    append_int(buf_, row.auction_id);
    buf_ += ',';
    append_double(buf_, row.multiplier);
    buf_ += ',';
    append_double(buf_, row.bid);
    buf_ += ',';
    append_double(buf_, row.click_prob);
    buf_ += ',';
    append_double(buf_, row.cpc);
    buf_ += '\n';
    out_ << buf_;
    ++n_;
}

void for_each_raw_row(const std::filesystem::path& path,
                      const std::function<void(const RawRow&)>& fn) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    std::string line;
    std::size_t line_no = 0;
    RawRow row;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1) {
            if (line.rfind("bidder_id,", 0) != 0)
                throw IoError("csv row 1: missing raw log header");
            continue;
        }
        if (line.empty()) continue;
        FieldReader r{line.data(), line.data() + line.size(), line_no};
        row.bidder_id.assign(r.next());
        row.hour = r.next_int();
        row.auction_id = r.next_int();
        row.multiplier = r.next_double();
        row.bid = r.next_double();
        row.click_prob = r.next_double();
        row.cpc = r.next_double();
        if (!r.done())
            throw IoError("csv row " + std::to_string(line_no) + ": too many fields");
        if (row.bidder_id.empty())
            throw IoError("csv row " + std::to_string(line_no) + ": empty bidder_id");
        fn(row);
    }
}

std::vector<RawRow> read_raw_log(const std::filesystem::path& path) {
    std::vector<RawRow> rows;
    for_each_raw_row(path, [&](const RawRow& row) { rows.push_back(row); });
    return rows;
}

void write_dataset_csv(const std::filesystem::path& path,
                       std::span<const BidderSeries> series) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "bidder_id,hour,mean_bid,click_saturation,click_half_sat,cost_slope,n_auctions,"
           "train_end,won_top_slot\n";
    std::string buf;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.hours.size(); ++i) {
            const auto& h = s.hours[i];
            buf.clear();
            buf += s.bidder_id;
            buf += ',';
            append_int(buf, h.hour);
            buf += ',';
            append_double(buf, h.bid);
            buf += ',';
            append_double(buf, h.curves.click.saturation);
            buf += ',';
            append_double(buf, h.curves.click.half_sat);
            buf += ',';
            append_double(buf, h.curves.cost.slope);
            buf += ',';
            append_int(buf, h.curves.n_auctions);
            buf += ',';
            append_int(buf, static_cast<std::int64_t>(s.train_end));
            buf += ',';
            buf += s.won_top_slot ? '1' : '0';
            buf += '\n';
            out << buf;
        }
    }
}

std::vector<BidderSeries> read_dataset_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    std::map<std::string, BidderSeries> by_bidder;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 || line.empty()) continue;
        FieldReader r{line.data(), line.data() + line.size(), line_no};
        const std::string id(r.next());
        HourRecord h;
        h.hour = r.next_int();
        h.bid = r.next_double();
        h.curves.hour = h.hour;
        h.curves.click.saturation = r.next_double();
        h.curves.click.half_sat = r.next_double();
        h.curves.cost.slope = r.next_double();
        h.curves.n_auctions = static_cast<int>(r.next_int());
        const auto train_end = static_cast<std::size_t>(r.next_int());
        const bool top = r.next_int() != 0;

        auto& s = by_bidder[id];
        s.bidder_id = id;
        s.train_end = train_end;
        s.won_top_slot = top;
        s.hours.push_back(h);
    }
    std::vector<BidderSeries> out;
    out.reserve(by_bidder.size());
    for (auto& [id, s] : by_bidder) out.push_back(std::move(s));
    return out;
}

} // namespace bidcast
