#include <benchmark/benchmark.h>

#include "nullrec/coefficients.hpp"
#include "nullrec/limit.hpp"

using namespace nullrec;

static void BM_SampleV(benchmark::State& state) {
    const TimeGrid grid(0.0, 1.0, 256);
    const double h_inner = 1.0 / static_cast<double>(state.range(0));
    std::uint64_t stream = 0;
    for (auto _ : state) {
        const FractionalKineticPath V = sample_V(grid, 2, SeedSpec{5, stream++}, h_inner);
        benchmark::DoNotOptimize(V.V.data().data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleV)->Arg(1 << 13)->Arg(1 << 16);

static void BM_SampleZeta0Oscillator(benchmark::State& state) {
    const CoefficientSet cs = build_catalog_entry("oscillator");
    const TimeGrid grid(0.0, 1.0, static_cast<std::size_t>(state.range(0)));
    Eigen::VectorXd y0(2);
    y0 << 1.0, 0.0;
    const OdeSolution ode = solve_ode(cs, y0, grid);
    const DiffusionKernel kernel = diffusion_kernel(cs, ode);
    const FundamentalMatrix Phi = fundamental_matrix(cs, ode);
    std::uint64_t stream = 0;
    for (auto _ : state) {
        const FractionalKineticPath V = sample_V(grid, 2, SeedSpec{6, stream++}, 1e-4);
        const LimitDeviationPath z = sample_zeta0(kernel, Phi, V);
        benchmark::DoNotOptimize(z.zeta.data().data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleZeta0Oscillator)->Arg(256)->Arg(1024);
