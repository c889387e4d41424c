// Serial reference vs OpenMP ensemble kernel.

#include <benchmark/benchmark.h>

#include <omp.h>

#include "psde/montecarlo.hpp"

namespace {

psde::RunConfig bench_config(std::uint64_t n_paths, bool sens)
{
    psde::RunConfig c;
    c.n_paths = n_paths;
    c.h = 0.01;
    c.params.kappa = 1e-3;
    if (sens)
        c.sens.insert(psde::Param::kappa);
    return c;
}

void BM_serial(benchmark::State& state)
{
    const psde::RunConfig c = bench_config(state.range(0), state.range(1) != 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(psde::run_ensemble_serial(c));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_openmp(benchmark::State& state)
{
    psde::RunConfig c = bench_config(state.range(0), state.range(1) != 0);
    c.workers = static_cast<int>(state.range(2));
    for (auto _ : state)
        benchmark::DoNotOptimize(psde::run_ensemble(c));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_serial)->ArgsProduct({{2000}, {0, 1}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_openmp)
    ->ArgsProduct({{2000}, {0, 1}, benchmark::CreateRange(1, omp_get_num_procs() > 1 ? omp_get_num_procs() : 2, 2)})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
