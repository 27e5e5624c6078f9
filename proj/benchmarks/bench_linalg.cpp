#include <benchmark/benchmark.h>

#include <random>

#include "pitaron/linalg.hpp"

namespace {

pitaron::Matrix random_matrix(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  pitaron::Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = pitaron::Complex(normal(gen), normal(gen));
  }
  return a / std::sqrt(2.0 * static_cast<double>(n));
}

void BM_MatExp(benchmark::State& state) {
  const pitaron::Matrix a = random_matrix(state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(pitaron::mat_exp(a));
}
BENCHMARK(BM_MatExp)->RangeMultiplier(2)->Range(2, 64);

void BM_PolarUnitaryFactor(benchmark::State& state) {
  const pitaron::Matrix a = random_matrix(state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(pitaron::polar_unitary_factor(a));
}
BENCHMARK(BM_PolarUnitaryFactor)->RangeMultiplier(2)->Range(2, 64);

void BM_LyapunovSolve(benchmark::State& state) {
  const pitaron::Matrix g = random_matrix(state.range(0), 3);
  const pitaron::Matrix n = g * g.adjoint() + pitaron::identity(state.range(0));
  const pitaron::Matrix q = random_matrix(state.range(0), 4);
  for (auto _ : state) benchmark::DoNotOptimize(pitaron::lyapunov_solve(n, q));
}
BENCHMARK(BM_LyapunovSolve)->RangeMultiplier(2)->Range(2, 64);

}  // namespace
