#include <benchmark/benchmark.h>

#include "bidcast/regret.hpp"

#include <cmath>
#include <vector>

namespace {

std::vector<bidcast::HourRecord> make_series(int n) {
    std::vector<bidcast::HourRecord> hours;
    for (int t = 0; t < n; ++t) {
        bidcast::HourRecord h;
        h.hour = t;
        h.bid = 150.0 + 20.0 * std::sin(t / 6.0);
        h.curves.hour = t;
        h.curves.click = {1.0, 100.0 * (1.0 + 0.3 * std::sin(t / 5.0))};
        h.curves.cost = {0.5 * (1.0 + 0.3 * std::cos(t / 7.0))};
        hours.push_back(h);
    }
    return hours;
}

} // namespace

static void BM_EstimateValues(benchmark::State& state) {
    const auto hours = make_series(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto est = bidcast::estimate_values(hours);
        benchmark::DoNotOptimize(est);
    }
}
BENCHMARK(BM_EstimateValues)->Arg(120)->Arg(300)->Unit(benchmark::kMillisecond);

static void BM_AverageRegret(benchmark::State& state) {
    const auto hours = make_series(static_cast<int>(state.range(0)));
    const auto grid = bidcast::deviation_bid_grid(hours);
    for (auto _ : state) {
        benchmark::DoNotOptimize(bidcast::average_regret(hours, 400.0, grid));
    }
}
BENCHMARK(BM_AverageRegret)->Arg(120)->Arg(300)->Unit(benchmark::kMillisecond);
