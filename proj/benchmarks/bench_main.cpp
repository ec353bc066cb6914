#include <benchmark/benchmark.h>

#include "cavityband/bloch.hpp"
#include "cavityband/catastrophe.hpp"
#include "cavityband/photon.hpp"

using namespace cavityband;

static void BM_SolveBloch(benchmark::State& st) {
  const double v = static_cast<double>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(solve_bloch(0.37, v).mu);
}
BENCHMARK(BM_SolveBloch)->Arg(1)->Arg(10)->Arg(100)->Arg(1000);

static void BM_OverlapSlope(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(overlap_slope(0.37, 5.0));
}
BENCHMARK(BM_OverlapSlope);

static void BM_OverlapTower(benchmark::State& st) {
  const int order = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(overlap_derivatives(0.69, 7.75, 0, order).d[order]);
}
BENCHMARK(BM_OverlapTower)->DenseRange(1, 4);

static void BM_FindBranches(benchmark::State& st) {
  const SystemParams p{350, 1e4, 1, 909.9, 3140};
  for (auto _ : st) benchmark::DoNotOptimize(find_branches(0.0, p).count());
}
BENCHMARK(BM_FindBranches)->Unit(benchmark::kMillisecond);

static void BM_SwallowtailScan(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(swallowtail_scan(0.69, {}, Execution{1}).size());
}
BENCHMARK(BM_SwallowtailScan)->Unit(benchmark::kMillisecond)->Iterations(2);
BENCHMARK_MAIN();
