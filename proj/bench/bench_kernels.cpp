// Serial against OpenMP versions of the two exact kernels: the exhaustive
// census of small graphs and the coefficient recursion behind every level
// of the chain.
#include <benchmark/benchmark.h>

#include "cgs/gfchain/brute_force.hpp"
#include "cgs/gfchain/chain.hpp"

namespace {

void BM_CensusSerial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cgs::gfchain::brute_force_census_serial(n));
}

void BM_CensusParallel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cgs::gfchain::brute_force_census_parallel(n));
}

void chain(benchmark::State& state, bool parallel) {
  cgs::gfchain::ChainOptions opts;
  opts.parallel = parallel;
  const int t = static_cast<int>(state.range(0));
  const int order = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(cgs::gfchain::build_chain(t, 1, order, opts));
}

void BM_ChainSerial(benchmark::State& state) { chain(state, false); }
void BM_ChainParallel(benchmark::State& state) { chain(state, true); }

}  // namespace

BENCHMARK(BM_CensusSerial)->Arg(6)->Arg(7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CensusParallel)->Arg(6)->Arg(7)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ChainSerial)->Args({2, 200})->Args({3, 60})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ChainParallel)->Args({2, 200})->Args({3, 60})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
