#include <benchmark/benchmark.h>

#include <cmath>

#include "pitaron/hamiltonian.hpp"
#include "pitaron/series.hpp"

namespace {

// Nested Simpson costs panels^order samples per term.
void BM_DysonU(benchmark::State& state) {
  const pitaron::HamiltonianSpec spec = pitaron::pauli_hamiltonian(
      [](double t) { return std::cos(t); }, [](double t) { return std::sin(t); }, [](double) { return 0.5; });
  const int order = static_cast<int>(state.range(0));
  const int panels = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(pitaron::dyson_u(spec, 0.0, 0.5, order, panels));
}
BENCHMARK(BM_DysonU)->Args({1, 200})->Args({2, 200})->Args({2, 400})->Args({3, 50})->Args({3, 100});

void BM_GeneralPitaronExpansion(benchmark::State& state) {
  const pitaron::HamiltonianSpec spec = pitaron::HamiltonianSpec::constant(
      pitaron::pauli_x() - 0.3 * pitaron::kI * pitaron::pauli_z());
  for (auto _ : state) benchmark::DoNotOptimize(pitaron::general_pitaron_expansion(spec, 0.0, 0.5, 200));
}
BENCHMARK(BM_GeneralPitaronExpansion);

}  // namespace
