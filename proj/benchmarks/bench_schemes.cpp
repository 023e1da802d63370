#include <benchmark/benchmark.h>

#include "mfg/major.hpp"
#include "mfg/splitting.hpp"

using namespace mfg;

namespace {

// A fresh scheme per iteration, so the memo cache starts cold.
void BM_SplittingCold(benchmark::State& state) {
    Scenario s = defaultScenario().withGrid(32);
    s.T = 0.2;
    const int N = static_cast<int>(state.range(0));
    const auto m = s.defaultInitial();
    std::uint64_t solves = 0;
    for (auto _ : state) {
        SplittingScheme scheme(s, N);
        benchmark::DoNotOptimize(scheme.eval(0, m));
        solves = scheme.counters().mfgSolves;
    }
    state.counters["mfgSolves"] = static_cast<double>(solves);
}
BENCHMARK(BM_SplittingCold)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_SplittingWarm(benchmark::State& state) {
    Scenario s = defaultScenario().withGrid(32);
    s.T = 0.2;
    SplittingScheme scheme(s, 2);
    const auto m = s.defaultInitial();
    benchmark::DoNotOptimize(scheme.eval(0, m));
    for (auto _ : state) benchmark::DoNotOptimize(scheme.eval(0, m));
}
BENCHMARK(BM_SplittingWarm)->Unit(benchmark::kMicrosecond);

void BM_MajorCold(benchmark::State& state) {
    Scenario s = defaultScenario().withGrid(16);
    s.x0grid = TorusGrid(16);
    s.T = 0.2;
    SchemeConfig cfg;
    cfg.inner.tol = 1e-6;
    const auto m = s.defaultInitial();
    for (auto _ : state) {
        MajorScheme scheme(s, static_cast<int>(state.range(0)), cfg);
        benchmark::DoNotOptimize(scheme.eval(0, m));
    }
}
BENCHMARK(BM_MajorCold)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace
