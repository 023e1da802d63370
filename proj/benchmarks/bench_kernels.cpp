#include <benchmark/benchmark.h>

#include <cmath>

#include "mfg/linear_master.hpp"
#include "mfg/measures.hpp"
#include "mfg/mfg_system.hpp"

using namespace mfg;

namespace {

GridDensity bump(const TorusGrid& g, double mu) { return GridDensity::wrappedGaussian(g, mu, 0.4); }

void BM_Wasserstein1(benchmark::State& state) {
    const TorusGrid g(static_cast<std::size_t>(state.range(0)));
    const auto a = bump(g, 1.0), b = bump(g, 4.0);
    for (auto _ : state) benchmark::DoNotOptimize(wasserstein1(a, b));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Wasserstein1)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

void BM_Wasserstein2(benchmark::State& state) {
    const TorusGrid g(static_cast<std::size_t>(state.range(0)));
    const auto a = bump(g, 1.0), b = bump(g, 4.0);
    for (auto _ : state) benchmark::DoNotOptimize(wasserstein2(a, b));
}
BENCHMARK(BM_Wasserstein2)->RangeMultiplier(4)->Range(16, 256);

void BM_FPForward(benchmark::State& state) {
    const TorusGrid g(static_cast<std::size_t>(state.range(0)));
    const FieldAt drift = [&](std::size_t, std::span<double> out) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::sin(g.node(i));
    };
    const TimeMesh mesh(0.0, 0.25, 64);
    const auto m0 = bump(g, 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(solveFPForward(Diffusion::constant(0.5), drift, m0, mesh));
}
BENCHMARK(BM_FPForward)->Arg(32)->Arg(64)->Arg(128)->Arg(256);

void BM_SolveMFG(benchmark::State& state) {
    const Scenario s = defaultScenario().withGrid(static_cast<std::size_t>(state.range(0)));
    const auto m0 = s.defaultInitial();
    for (auto _ : state) benchmark::DoNotOptimize(solveMFG(s, 0.0, m0, s.x0));
}
BENCHMARK(BM_SolveMFG)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_LinearMaster(benchmark::State& state) {
    const Scenario s = defaultScenario().withGrid(static_cast<std::size_t>(state.range(0)));
    const auto G = terminalFunctional(s.G, s.x0);
    const auto m = s.defaultInitial();
    for (auto _ : state) benchmark::DoNotOptimize(evalLinearMaster(G, 0.3, m, 1.0));
}
BENCHMARK(BM_LinearMaster)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
