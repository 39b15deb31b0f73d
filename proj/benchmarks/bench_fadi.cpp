#include "teq/generators.hpp"
#include "teq/lowrank_sylvester.hpp"

#include <benchmark/benchmark.h>

using namespace teq;

namespace {

IntervalPair laplace_pair(Index n) {
  const Vector ev = laplace1d_eigenvalues(n);
  return {ev.minCoeff(), ev.maxCoeff(), ev.minCoeff(), ev.maxCoeff()};
}

}  // namespace

// fADI on the banded Laplacian with a rank-2 right-hand side and s shifts.
static void BM_Fadi(benchmark::State& state) {
  const Index n = state.range(0);
  const int s = static_cast<int>(state.range(1));
  const HMatrixOperator A(HMatrix::from_banded(gen_laplace1d(n), 64));
  const ShiftSet S = zolotarev_shifts(s, laplace_pair(n));
  const LowRank rhs{Matrix::Random(n, 2), Matrix::Random(n, 2)};
  for (auto _ : state) benchmark::DoNotOptimize(fadi(A, A, rhs, S));
}
BENCHMARK(BM_Fadi)->Args({1024, 16})->Args({1024, 32})->Args({4096, 32})->Unit(benchmark::kMillisecond);

static void BM_RationalKrylov(benchmark::State& state) {
  const Index n = state.range(0);
  const int s = static_cast<int>(state.range(1));
  const HMatrixOperator A(HMatrix::from_banded(gen_laplace1d(n), 64));
  const ShiftSet S = zolotarev_shifts(s, laplace_pair(n));
  const LowRank rhs{Matrix::Random(n, 2), Matrix::Random(n, 2)};
  for (auto _ : state) benchmark::DoNotOptimize(rk_solve(A, A, rhs, S));
}
BENCHMARK(BM_RationalKrylov)->Args({1024, 16})->Unit(benchmark::kMillisecond);

static void BM_ZolotarevShifts(benchmark::State& state) {
  const IntervalPair pr = laplace_pair(4096);
  for (auto _ : state) benchmark::DoNotOptimize(zolotarev_shifts(static_cast<int>(state.range(0)), pr));
}
BENCHMARK(BM_ZolotarevShifts)->Arg(8)->Arg(32);

BENCHMARK_MAIN();
