#include <random>

#include <benchmark/benchmark.h>

#include "sopf/learn.hpp"
#include "sopf/objective.hpp"

namespace {

using namespace sopf;

SnapshotDataset random_data(Eigen::Index n, Eigen::Index m, Eigen::Index samples) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  auto draw = [&](Eigen::Index r, Eigen::Index c) {
    Matrix out(r, c);
    for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = normal(rng);
    return out;
  };
  SnapshotDataset d;
  d.X = draw(n, samples);
  d.U = draw(m, samples);
  d.Xdot = draw(n, samples);
  d.t.resize(static_cast<std::size_t>(samples));
  for (Eigen::Index k = 0; k < samples; ++k) d.t[static_cast<std::size_t>(k)] = 0.01 * k;
  return d;
}

void loss_and_gradient(benchmark::State& state, StableObjective::Mode mode) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const auto samples = static_cast<Eigen::Index>(state.range(1));
  const SnapshotDataset data = random_data(n, 2, samples);
  const StableObjective objective(data, 1e-4, mode);
  const auto p = StableParametrization::gaussian(n, 2, 0.1, 3);
  StableParametrization grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(objective.loss_and_gradient(p, grad));
  }
}

void BM_LossGradientDirect(benchmark::State& state) {
  loss_and_gradient(state, StableObjective::Mode::Direct);
}
BENCHMARK(BM_LossGradientDirect)->Args({2, 400})->Args({9, 20020});

void BM_LossGradientGram(benchmark::State& state) {
  loss_and_gradient(state, StableObjective::Mode::Gram);
}
BENCHMARK(BM_LossGradientGram)->Args({2, 400})->Args({9, 20020});

void BM_FitBaseline(benchmark::State& state) {
  const SnapshotDataset data = random_data(9, 2, 20020);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_baseline(data, 1e-8));
  }
}
BENCHMARK(BM_FitBaseline)->Unit(benchmark::kMillisecond);

}  // namespace
