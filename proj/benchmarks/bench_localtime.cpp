#include <benchmark/benchmark.h>

#include "nullrec/localtime.hpp"
#include "nullrec/paths.hpp"

using namespace nullrec;

static void BM_LocalTimeOccupation(benchmark::State& state) {
    const TimeGrid grid(0.0, 1.0, static_cast<std::size_t>(state.range(0)));
    const SamplePath w = sample_brownian(grid, 1, SeedSpec{3, 0});
    const double delta = default_bandwidth(grid);
    for (auto _ : state) {
        const LocalTimeCurve c = local_time_occupation(w, 0.0, delta);
        benchmark::DoNotOptimize(c.L.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LocalTimeOccupation)->Arg(1 << 14)->Arg(1 << 18);

static void BM_LocalTimeTanaka(benchmark::State& state) {
    const TimeGrid grid(0.0, 1.0, static_cast<std::size_t>(state.range(0)));
    const SamplePath w = sample_brownian(grid, 1, SeedSpec{3, 0});
    for (auto _ : state) {
        const LocalTimeCurve c = local_time_tanaka(w, 0.0);
        benchmark::DoNotOptimize(c.L.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LocalTimeTanaka)->Arg(1 << 14)->Arg(1 << 18);
