#include <benchmark/benchmark.h>

#include "lfgs/experiments.hpp"
#include "lfgs/rng.hpp"

using namespace lfgs;

namespace {

void BM_MatrixExp(benchmark::State& state) {
  const Index k = state.range(0);
  auto eng = make_engine(1, 0);
  Matrix a = gaussian_matrix(k, k, eng);
  a = 0.5 * (a - a.transpose().eval());
  for (auto _ : state) benchmark::DoNotOptimize(matrix_exp(a));
}
BENCHMARK(BM_MatrixExp)->Arg(6)->Arg(12)->Arg(24);

void BM_ExpMap(benchmark::State& state) {
  StiefelPoint x = random_point(state.range(0), 3, 2);
  TangentVector xi = random_tangent(x, 0.8, 3);
  for (auto _ : state) benchmark::DoNotOptimize(exp_map(xi, 1.0));
}
BENCHMARK(BM_ExpMap)->Arg(12)->Arg(24)->Arg(48);

void BM_LogShooting(benchmark::State& state) {
  StiefelPoint x = random_point(state.range(0), 3, 4);
  TangentVector xi = random_tangent(x, 0.8, 5);
  StiefelPoint y = exp_map(xi, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(log_map_shooting(x, y));
}
BENCHMARK(BM_LogShooting)->Arg(12)->Arg(24);

void BM_GeodesicMidpoint(benchmark::State& state) {
  StiefelPoint x = random_point(12, 3, 6);
  TangentVector xi = random_tangent(x, 0.6, 7);
  StiefelPoint y = exp_map(xi, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(geodesic_midpoint(x, y));
}
BENCHMARK(BM_GeodesicMidpoint);

void BM_LeapfrogSweep(benchmark::State& state) {
  const int m = state.range(0);
  StiefelPoint x = random_point(12, 3, 8);
  TangentVector xi = random_tangent(x, 0.95 * std::numbers::pi, 9);
  PiecewisePath path = path_geodesic_sample(xi, m);
  for (auto _ : state) benchmark::DoNotOptimize(leapfrog_sweep(path));
}
BENCHMARK(BM_LeapfrogSweep)->Arg(5)->Arg(10)->Arg(20);

void BM_HessianAssembly(benchmark::State& state) {
  StiefelPoint x = random_point(8, 2, 10);
  TangentVector xi = random_tangent(x, 0.4, 11);
  PiecewisePath path = path_geodesic_sample(xi, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_Gprime(path));
}
BENCHMARK(BM_HessianAssembly)->Arg(4)->Arg(8);

void BM_SplitAE(benchmark::State& state) {
  StiefelPoint x = random_point(8, 2, 12);
  TangentVector xi = random_tangent(x, 0.4, 13);
  PiecewisePath path = path_geodesic_sample(xi, 5);
  for (auto _ : state) benchmark::DoNotOptimize(split_A_E(path));
}
BENCHMARK(BM_SplitAE);

}  // namespace

BENCHMARK_MAIN();
