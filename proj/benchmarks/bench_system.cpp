#include <benchmark/benchmark.h>

#include "sopf/benchmark_systems.hpp"
#include "sopf/parametrization.hpp"
#include "sopf/signals.hpp"
#include "sopf/simulate.hpp"
#include "sopf/stability.hpp"

namespace {

using namespace sopf;

void BM_RhsDense(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const auto sys = materialize(StableParametrization::gaussian(n, 1, 0.5, 1));
  const Vector x = Vector::Ones(n);
  const Vector u = Vector::Ones(1);
  Vector out(n);
  for (auto _ : state) {
    sys.rhs_into(x, u, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_RhsDense)->Arg(2)->Arg(9)->Arg(32);

void BM_RhsBurgers(benchmark::State& state) {
  const auto sys = burgers_semidiscrete();
  const Vector x = burgers_nodes({}).array().sin();
  const Vector u = Vector::Ones(2);
  Vector out(sys.state_dim());
  for (auto _ : state) {
    sys.rhs_into(x, u, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_RhsBurgers);

void BM_SimulateExample(benchmark::State& state) {
  const auto sys = example_one();
  const auto t = linspace(0.0, 10.0, 1001);
  const InputFunction u = as_input(fixed_test_signals().u1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(sys, Vector::Zero(2), u, t));
  }
}
BENCHMARK(BM_SimulateExample)->Unit(benchmark::kMillisecond);

void BM_SimulateBurgers(benchmark::State& state) {
  const auto sys = burgers_semidiscrete();
  const auto t = linspace(0.0, 10.0, 1001);
  const InputFunction u = as_input(sample_training_signals(SignalFamily::BurgersTrain, 1, 0)[0]);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(sys, Vector::Zero(sys.state_dim()), u, t));
  }
}
BENCHMARK(BM_SimulateBurgers)->Unit(benchmark::kMillisecond);

void BM_EnergyCheck(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Matrix H = materialize(StableParametrization::gaussian(n, 1, 1.0, 2)).H();
  for (auto _ : state) {
    benchmark::DoNotOptimize(energy_preserving_check(H));
  }
}
BENCHMARK(BM_EnergyCheck)->Arg(9)->Arg(32);

}  // namespace
