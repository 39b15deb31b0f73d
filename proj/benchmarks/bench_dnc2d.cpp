#include "teq/dnc.hpp"
#include "teq/generators.hpp"
#include "teq/parallel.hpp"

#include <benchmark/benchmark.h>

using namespace teq;

// 2D Laplace solve; the first argument is n, the second n_min.
static void BM_Laplace2d(benchmark::State& state) {
  set_thread_budget(1);
  const Index n = state.range(0);
  SolverConfig cfg;
  cfg.eps = 1e-6;
  cfg.n_min = state.range(1);
  const HMatrix L = HMatrix::from_banded(gen_laplace1d(n), cfg.n_min);
  const Tensor B = Tensor::random({n, n}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(lyap2d_dnc(L, L, B, cfg));
  state.SetComplexityN(n);
}
BENCHMARK(BM_Laplace2d)
    ->Args({256, 64})
    ->Args({512, 128})
    ->Args({1024, 256})
    ->Args({2048, 256})
    ->Unit(benchmark::kMillisecond);

static void BM_Laplace3d(benchmark::State& state) {
  set_thread_budget(1);
  const Index n = state.range(0);
  SolverConfig cfg;
  cfg.eps = 1e-6;
  cfg.n_min = 16;
  const HMatrix L = HMatrix::from_banded(gen_laplace1d(n), cfg.n_min);
  const Tensor B = Tensor::random({n, n, n}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(lyapnd_dnc({L, L, L}, B, cfg));
}
BENCHMARK(BM_Laplace3d)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

// Dense diagonalization baseline at the same sizes.
static void BM_Laplace2dDense(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix A = gen_laplace1d(n).dense();
  const Tensor B = Tensor::random({n, n}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(lyapnd_diag(std::vector<Matrix>{A, A}, B));
}
BENCHMARK(BM_Laplace2dDense)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
