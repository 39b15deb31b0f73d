#include "teq/generators.hpp"
#include "teq/hmatrix.hpp"

#include <benchmark/benchmark.h>

using namespace teq;

// Shifted solve with the hierarchical random SPD coefficient of bandwidth 8.
static void BM_ShiftedSolveHss(benchmark::State& state) {
  const Index n = state.range(0);
  const RandomSpd R = gen_random_spd_hss(n, 1.0, 8, 1);
  const HMatrix H = HMatrix::from_dense(R.A, ClusterTree::build(n, 64), 1e-12);
  const Matrix B = Matrix::Random(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(H.shifted_solve(0.5, B));
}
BENCHMARK(BM_ShiftedSolveHss)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_ShiftedSolveBanded(benchmark::State& state) {
  const Index n = state.range(0);
  const HMatrix H = HMatrix::from_banded(gen_laplace1d(n), 64);
  const Matrix B = Matrix::Random(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(H.shifted_solve(0.5, B));
}
BENCHMARK(BM_ShiftedSolveBanded)->Arg(1024)->Arg(8192)->Unit(benchmark::kMicrosecond);

static void BM_Matvec(benchmark::State& state) {
  const Index n = state.range(0);
  const RandomSpd R = gen_random_spd_hss(n, 1.0, 8, 1);
  const HMatrix H = HMatrix::from_dense(R.A, ClusterTree::build(n, 64), 1e-12);
  const Matrix X = Matrix::Random(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(H.matvec(X));
}
BENCHMARK(BM_Matvec)->Arg(512)->Arg(1024)->Unit(benchmark::kMicrosecond);

static void BM_Compress(benchmark::State& state) {
  const Index n = state.range(0);
  const RandomSpd R = gen_random_spd_hss(n, 1.0, 8, 1);
  const ClusterTree tree = ClusterTree::build(n, 64);
  for (auto _ : state) benchmark::DoNotOptimize(HMatrix::from_dense(R.A, tree, 1e-12));
}
BENCHMARK(BM_Compress)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
