#include <random>

#include <benchmark/benchmark.h>

#include "sopf/dataprep.hpp"

namespace {

using namespace sopf;

Matrix snapshots(Eigen::Index n, Eigen::Index count) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> normal;
  Matrix Y(n, count);
  for (Eigen::Index i = 0; i < Y.size(); ++i) Y.data()[i] = normal(rng);
  return Y;
}

void BM_PodFit(benchmark::State& state) {
  const Matrix Y = snapshots(249, state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pod_fit(Y, PodCriterion::with_rank(9)));
  }
}
BENCHMARK(BM_PodFit)->Arg(1001)->Arg(20020)->Unit(benchmark::kMillisecond);

void BM_StencilDerivatives(benchmark::State& state) {
  const Matrix X = snapshots(9, 1001);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_derivatives(X, 0.01));
  }
}
BENCHMARK(BM_StencilDerivatives);

}  // namespace
