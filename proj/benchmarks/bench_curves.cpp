#include <benchmark/benchmark.h>

#include "bidcast/curves.hpp"
#include "bidcast/simulator.hpp"
#include "bidcast/rng.hpp"

#include <vector>

namespace {

std::vector<bidcast::CurvePoint> make_points(int n_auctions, double noise) {
    bidcast::Rng rng(99);
    const bidcast::ClickCurve truth{0.9, 120.0};
    const bidcast::CostCurve cost{0.5};
    std::vector<bidcast::CurvePoint> pts;
    for (int a = 0; a < n_auctions; ++a) {
        for (double m : bidcast::kBidMultipliers) {
            const double bid = 100.0 * m;
            pts.push_back({bid, truth.value(bid) * rng.lognormal(noise),
                           cost.value(bid) * rng.lognormal(noise)});
        }
    }
    return pts;
}

} // namespace

static void BM_FitClickCurve(benchmark::State& state) {
    const auto pts = make_points(static_cast<int>(state.range(0)), 0.05);
    for (auto _ : state) {
        auto curve = bidcast::fit_click_curve(pts);
        benchmark::DoNotOptimize(curve);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FitClickCurve)->Arg(1)->Arg(5)->Arg(20);

static void BM_FitCostCurve(benchmark::State& state) {
    const auto pts = make_points(5, 0.05);
    for (auto _ : state) {
        auto curve = bidcast::fit_cost_curve(pts);
        benchmark::DoNotOptimize(curve);
    }
}
BENCHMARK(BM_FitCostCurve);

BENCHMARK_MAIN();
