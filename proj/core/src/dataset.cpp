#include "bidcast/dataset.hpp"

#include "bidcast/errors.hpp"
#include "bidcast/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace bidcast {

namespace {

struct HourBucket {
    std::vector<CurvePoint> points;
    std::map<std::int64_t, double> auction_bids; // auction_id -> actual bid
};

int hod_of(std::int64_t hour) { return static_cast<int>(((hour % 24) + 24) % 24); }

std::int64_t day_of(std::int64_t hour) {
    return hour >= 0 ? hour / 24 : (hour - 23) / 24;
}

} // namespace

namespace {

using GroupedRows = std::map<std::string, std::map<std::int64_t, HourBucket>>;

void group_row(GroupedRows& grouped, const RawRow& r) {
    HourBucket& bucket = grouped[r.bidder_id][r.hour];
    bucket.points.push_back(CurvePoint{r.bid, r.click_prob, r.cpc});
    if (std::fabs(r.multiplier - 1.0) < 1e-12) {
        bucket.auction_bids[r.auction_id] = r.bid;
    } else if (r.multiplier > 0.0) {
        bucket.auction_bids.emplace(r.auction_id, r.bid / r.multiplier);
    }
}

std::vector<BidderSeries> fit_grouped(GroupedRows& grouped);

} // namespace

std::vector<BidderSeries> aggregate_hourly(std::span<const RawRow> rows) {
    GroupedRows grouped;
    for (const auto& r : rows) group_row(grouped, r);
    return fit_grouped(grouped);
}

std::vector<BidderSeries> aggregate_hourly_file(const std::filesystem::path& path,
                                                std::uint64_t* n_rows) {
    GroupedRows grouped;
    std::uint64_t count = 0;
    for_each_raw_row(path, [&](const RawRow& r) {
        group_row(grouped, r);
        ++count;
    });
    if (n_rows) *n_rows = count;
    return fit_grouped(grouped);
}

namespace {

std::vector<BidderSeries> fit_grouped(GroupedRows& grouped) {
    std::vector<BidderSeries> out;
    out.reserve(grouped.size());
    for (auto& [id, hours] : grouped) {
        BidderSeries series;
        series.bidder_id = id;
        for (auto& [hour, bucket] : hours) {
            series.meta.n_raw_auctions += bucket.auction_bids.size();
            HourRecord rec;
            rec.hour = hour;
            double bid_sum = 0.0;
            for (const auto& [aid, bid] : bucket.auction_bids) bid_sum += bid;
            rec.bid = bucket.auction_bids.empty()
                          ? 0.0
                          : bid_sum / static_cast<double>(bucket.auction_bids.size());
            // fixed point order makes aggregation permutation-invariant
            std::sort(bucket.points.begin(), bucket.points.end(),
                      [](const CurvePoint& a, const CurvePoint& b) {
                          if (a.bid != b.bid) return a.bid < b.bid;
                          if (a.click_prob != b.click_prob) return a.click_prob < b.click_prob;
                          return a.cpc < b.cpc;
                      });
            try {
                rec.curves.hour = hour;
                rec.curves.click = fit_click_curve(bucket.points);
                rec.curves.cost = fit_cost_curve(bucket.points);
                rec.curves.n_auctions = static_cast<int>(bucket.auction_bids.size());
            } catch (const DegenerateFit&) {
                ++series.meta.n_dropped_hours;
                continue;
            }
            series.hours.push_back(std::move(rec));
        }
        if (!series.hours.empty()) out.push_back(std::move(series));
    }
    return out;
}

} // namespace

void split_train_test(BidderSeries& series) {
    if (series.hours.size() < 10)
        throw TooShort("split_train_test: need at least 10 hours, have " +
                       std::to_string(series.hours.size()));
    series.train_end =
        static_cast<std::size_t>(std::floor(0.9 * static_cast<double>(series.hours.size())));
}

std::vector<BidderSeries> filter_bidders(std::vector<BidderSeries> series,
                                         const FilterConfig& cfg, FilterCounts* counts) {
    FilterCounts local;
    FilterCounts& c = counts ? *counts : local;
    std::vector<BidderSeries> kept;
    kept.reserve(series.size());

    for (auto& s : series) {
        if (s.hours.size() < cfg.min_hours) {
            ++c.too_few_hours;
            continue;
        }
        if (!s.won_top_slot) {
            ++c.no_top_slot;
            continue;
        }
        bool positive = true;
        for (const auto& h : s.hours) positive = positive && h.bid > 0.0;
        if (!positive) {
            ++c.nonpositive_bids;
            continue;
        }
        std::vector<double> train_bids, test_bids;
        for (std::size_t i = 0; i < s.hours.size(); ++i)
            (i < s.train_end ? train_bids : test_bids).push_back(s.hours[i].bid);
        if (stats::sample_variance(train_bids) <= 0.0 ||
            stats::sample_variance(test_bids) <= 0.0) {
            ++c.zero_variance;
            continue;
        }
        kept.push_back(std::move(s));
    }
    c.kept = kept.size();
    return kept;
}

std::vector<ShiftInstance> build_shift_dataset(std::span<const BidderSeries> series,
                                               const ShiftConfig& cfg) {
    std::vector<ShiftInstance> out;
    const auto is_day = [&](int hod) {
        return hod >= cfg.day_start_hod && hod <= cfg.day_end_hod;
    };

    for (const auto& s : series) {
        // night pool spans the whole period
        std::vector<std::size_t> night_idx;
        std::vector<double> night_bids;
        for (std::size_t i = 0; i < s.hours.size(); ++i) {
            if (!is_day(hod_of(s.hours[i].hour))) {
                night_idx.push_back(i);
                night_bids.push_back(s.hours[i].bid);
            }
        }
        if (night_bids.size() < 2) continue;

        std::map<std::int64_t, std::vector<std::size_t>> by_day;
        for (std::size_t i = 0; i < s.hours.size(); ++i)
            by_day[day_of(s.hours[i].hour)].push_back(i);

        for (const auto& [day, idx] : by_day) {
            if (idx.size() != 24) continue; // active throughout all 24 hours
            std::vector<double> day_all;
            day_all.reserve(24);
            for (std::size_t i : idx) day_all.push_back(s.hours[i].bid);
            const double m = stats::mean(day_all);
            if (m <= 0.0 || stats::sample_stddev(day_all) / m < cfg.cv_min) continue;

            std::vector<double> day_bids;
            std::array<std::size_t, 12> day_idx{};
            std::size_t k = 0;
            for (std::size_t i : idx) {
                if (is_day(hod_of(s.hours[i].hour))) {
                    day_idx[k++] = i;
                    day_bids.push_back(s.hours[i].bid);
                }
            }
            if (k != 12) continue;

            const double ks_p = stats::ks_asymptotic_p(day_bids, night_bids);
            if (ks_p >= cfg.ks_p_max) continue;
            stats::WelchResult welch;
            try {
                welch = stats::welch_t_test(day_bids, night_bids);
            } catch (const Error&) {
                continue;
            }
            if (welch.p_two_sided >= cfg.t_p_max || welch.t <= 0.0) continue;

            ShiftInstance inst;
            inst.bidder_id = s.bidder_id;
            inst.day = day;
            inst.night_idx = night_idx;
            inst.day_idx = day_idx;
            inst.ks_p = ks_p;
            inst.t_p = welch.p_two_sided;
            // anchor: the 9:00 hour of the test day
            const std::int64_t anchor_hour = day * 24 + cfg.day_start_hod - 1;
            inst.anchor_in_night = 0;
            for (std::size_t p = 0; p < night_idx.size(); ++p) {
                if (s.hours[night_idx[p]].hour == anchor_hour) {
                    inst.anchor_in_night = p;
                    break;
                }
            }
            out.push_back(std::move(inst));
        }
    }
    return out;
}

std::array<double, 24> day_bids_of(const BidderSeries& series, const ShiftInstance& inst) {
    std::array<double, 24> bids{};
    for (const auto& h : series.hours) {
        if (day_of(h.hour) == inst.day)
            bids[static_cast<std::size_t>(hod_of(h.hour))] = h.bid;
    }
    return bids;
}

std::vector<EvalUnit> make_insample_units(std::span<const BidderSeries> series) {
    std::vector<EvalUnit> units;
    units.reserve(series.size());
    for (const auto& s : series) {
        EvalUnit u;
        u.id = s.bidder_id;
        u.train.assign(s.hours.begin(),
                       s.hours.begin() + static_cast<std::ptrdiff_t>(s.train_end));
        u.test.assign(s.hours.begin() + static_cast<std::ptrdiff_t>(s.train_end),
                      s.hours.end());
        u.anchor = s.train_end - 1;
        units.push_back(std::move(u));
    }
    return units;
}

std::vector<EvalUnit> make_shift_units(std::span<const BidderSeries> series,
                                       std::span<const ShiftInstance> instances) {
    std::map<std::string, const BidderSeries*> by_id;
    for (const auto& s : series) by_id[s.bidder_id] = &s;

    std::vector<EvalUnit> units;
    units.reserve(instances.size());
    for (const auto& inst : instances) {
        const auto it = by_id.find(inst.bidder_id);
        if (it == by_id.end()) continue;
        const BidderSeries& s = *it->second;
        EvalUnit u;
        u.id = inst.bidder_id + "@d" + std::to_string(inst.day);
        u.train.reserve(inst.night_idx.size());
        for (std::size_t i : inst.night_idx) u.train.push_back(s.hours[i]);
        for (std::size_t i : inst.day_idx) u.test.push_back(s.hours[i]);
        u.anchor = inst.anchor_in_night;
        u.day_profile = day_bids_of(s, inst);
        u.has_day_profile = true;
        units.push_back(std::move(u));
    }
    return units;
}

} // namespace bidcast
