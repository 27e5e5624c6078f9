#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "pitaron/hamiltonian.hpp"
#include "pitaron/propagation.hpp"

namespace {

pitaron::HamiltonianSpec rotating() {
  return pitaron::pauli_hamiltonian([](double t) { return std::cos(t); },
                                    [](double t) { return std::sin(t); }, [](double) { return 0.5; });
}

void BM_StepPropagator(benchmark::State& state) {
  const pitaron::HamiltonianSpec spec = rotating();
  const int steps = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pitaron::step_propagator(spec, 0.0, 2.0, steps));
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_StepPropagator)->Arg(100)->Arg(1000)->Arg(10000);

void BM_PitaronNhse(benchmark::State& state) {
  const int sites = static_cast<int>(state.range(0));
  const std::vector<double> hop(sites - 1, 1.0), gamma(sites - 1, 0.5);
  const pitaron::Matrix h = pitaron::nhse_hamiltonian(sites, 0.0, hop, gamma);
  const pitaron::Matrix u = pitaron::mat_exp(-pitaron::kI * h);
  for (auto _ : state) benchmark::DoNotOptimize(pitaron::pitaron(u));
}
BENCHMARK(BM_PitaronNhse)->Arg(4)->Arg(16)->Arg(64);

void BM_EvolveTrajectory(benchmark::State& state) {
  const pitaron::HamiltonianSpec spec = rotating();
  for (auto _ : state) benchmark::DoNotOptimize(pitaron::evolve_trajectory(spec, 0.0, 2.0, 201, 10));
}
BENCHMARK(BM_EvolveTrajectory);

}  // namespace
