#include <benchmark/benchmark.h>

#include "nullrec/coefficients.hpp"
#include "nullrec/sde.hpp"

using namespace nullrec;

static void BM_OscillatorEulerMaruyama(benchmark::State& state) {
    const CoefficientSet cs = build_catalog_entry("oscillator");
    const TimeGrid grid(0.0, 1.0, static_cast<std::size_t>(state.range(0)));
    Eigen::VectorXd y0(2);
    y0 << 1.0, 0.0;
    std::uint64_t stream = 0;
    for (auto _ : state) {
        const SamplePath Y = simulate_Y_unit_phi(cs, 0.1, y0, grid, SeedSpec{11, stream++});
        benchmark::DoNotOptimize(Y.data().data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OscillatorEulerMaruyama)->Arg(1 << 12)->Arg(1 << 16);

static void BM_CoupledPairGeneral(benchmark::State& state) {
    const CoefficientSet cs = build_catalog_entry("psi_bump");
    const TimeGrid grid(0.0, 1.0, static_cast<std::size_t>(state.range(0)));
    const Eigen::VectorXd y0 = Eigen::VectorXd::Zero(1);
    std::uint64_t stream = 0;
    for (auto _ : state) {
        const CoupledTrajectory t = simulate_pair_general(cs, 0.1, 0.0, y0, grid,
                                                          SeedSpec{12, stream++});
        benchmark::DoNotOptimize(t.Y.data().data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CoupledPairGeneral)->Arg(1 << 12)->Arg(1 << 16);
