#include <benchmark/benchmark.h>

#include "nullrec/paths.hpp"

using namespace nullrec;

static void BM_SampleBrownian1d(benchmark::State& state) {
    const TimeGrid grid(0.0, 1.0, static_cast<std::size_t>(state.range(0)));
    std::uint64_t stream = 0;
    for (auto _ : state) {
        const SamplePath p = sample_brownian(grid, 1, SeedSpec{7, stream++});
        benchmark::DoNotOptimize(p.data().data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleBrownian1d)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);

static void BM_GaussianStream(benchmark::State& state) {
    GaussianStream g(SeedSpec{1, 2}, 0);
    double acc = 0.0;
    for (auto _ : state) acc += g.next();
    benchmark::DoNotOptimize(acc);
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GaussianStream);
