#include <benchmark/benchmark.h>

#include "bidcast/forecasters.hpp"

#include <cmath>
#include <vector>

namespace {

using namespace bidcast;

std::vector<HourlyCurveSet> history(int n) {
    std::vector<HourlyCurveSet> out;
    for (int t = 0; t < n; ++t) {
        HourlyCurveSet c;
        c.hour = t;
        c.click = {1.0, 100.0 * (1.0 + 0.3 * std::sin(t / 5.0))};
        c.cost = {0.5 * (1.0 + 0.3 * std::cos(t / 7.0))};
        out.push_back(c);
    }
    return out;
}

std::vector<HourRecord> trajectory(int n) {
    const auto cs = history(n);
    FittedRule rule;
    rule.kind = RuleKind::OGD;
    rule.value = 900.0;
    rule.eta = 30.0;
    rule.max_bid = 5000.0;
    std::vector<HourRecord> hours;
    double state = 100.0;
    for (const auto& c : cs) {
        hours.push_back({c.hour, state, c});
        state = ogd_step(rule, state, c);
    }
    return hours;
}

} // namespace

static void BM_BrBid(benchmark::State& state) {
    const auto cs = history(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(bidcast::br_bid(900.0, cs[0], 5000.0));
    }
}
BENCHMARK(BM_BrBid);

static void BM_BrRegStep(benchmark::State& state) {
    const auto cs = history(1);
    FittedRule rule;
    rule.kind = RuleKind::BRReg;
    rule.value = 900.0;
    rule.eta = 50.0;
    rule.max_bid = 5000.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(brreg_step(rule, 150.0, cs[0]));
    }
}
BENCHMARK(BM_BrRegStep);

static void BM_FtrlStep(benchmark::State& state) {
    const auto cs = history(static_cast<int>(state.range(0)));
    FittedRule rule;
    rule.kind = RuleKind::FTRL;
    rule.value = 900.0;
    rule.eta = 100.0;
    rule.beta = 0.9;
    rule.max_bid = 5000.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ftrl_step(rule, cs));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FtrlStep)->Arg(60)->Arg(240)->Complexity(benchmark::oN);

static void BM_FitEtaGridBrReg(benchmark::State& state) {
    const auto hours = trajectory(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            fit_eta_grid(hours, 900.0, RuleKind::BRReg, 0.9, 5000.0));
    }
}
BENCHMARK(BM_FitEtaGridBrReg)->Arg(120)->Arg(240)->Unit(benchmark::kMillisecond);

static void BM_FitEtaGridFtrl(benchmark::State& state) {
    const auto hours = trajectory(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            fit_eta_grid(hours, 900.0, RuleKind::FTRL, 0.9, 5000.0));
    }
}
BENCHMARK(BM_FitEtaGridFtrl)->Arg(120)->Arg(240)->Unit(benchmark::kMillisecond);
