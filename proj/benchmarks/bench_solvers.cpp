#include <benchmark/benchmark.h>

#include "netlqr/lqr.hpp"
#include "netlqr/selection.hpp"
#include "netlqr/system.hpp"

using namespace netlqr;

static void RiccatiDoubling(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    NetworkSystem base = build_path_system(n, 3.0);
    NetworkSystem sys = base.with_dynamics(spectral_scale(base.A(), 1.0));
    const ActuatorSet S{{n / 2}};
    AreOptions opts;
    opts.method = AreMethod::doubling;
    for (auto _ : state) {
        CostSolution sol = solve_are(sys, S, opts);
        benchmark::DoNotOptimize(sol.P);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(RiccatiDoubling)->RangeMultiplier(2)->Range(8, 128)->Complexity()->Unit(benchmark::kMillisecond);

static void RiccatiFixedPoint(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    NetworkSystem sys = build_path_system(n, 0.9);
    const ActuatorSet S{{n / 2}};
    AreOptions opts;
    opts.method = AreMethod::fixed_point;
    for (auto _ : state) {
        CostSolution sol = solve_are(sys, S, opts);
        benchmark::DoNotOptimize(sol.P);
    }
}
BENCHMARK(RiccatiFixedPoint)->RangeMultiplier(2)->Range(8, 64)->Unit(benchmark::kMillisecond);

static void GreedyStep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    NetworkSystem sys = build_path_system(n, 0.95);
    for (auto _ : state) {
        SelectionResult r = greedy_select(sys, 1, Objective::trace, Direction::minimize);
        benchmark::DoNotOptimize(r.objective_value);
    }
}
BENCHMARK(GreedyStep)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
