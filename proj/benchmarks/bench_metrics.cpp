#include <benchmark/benchmark.h>

#include "clustergen/metrics.hpp"

namespace {

std::vector<int> labels(int n, int k, clustergen::Rng& rng) {
  std::uniform_int_distribution<int> u(0, k - 1);
  std::vector<int> v(static_cast<std::size_t>(n));
  for (int& x : v) x = u(rng);
  return v;
}

void BM_Ami(benchmark::State& state) {
  clustergen::Rng rng(2);
  const int n = static_cast<int>(state.range(0));
  const auto a = clustergen::Labeling::from(labels(n, 10, rng));
  const auto b = clustergen::Labeling::from(labels(n, 10, rng));
  for (auto _ : state) benchmark::DoNotOptimize(clustergen::ami(a, b));
}
BENCHMARK(BM_Ami)->Arg(1000)->Arg(100000);

void BM_KMeans(benchmark::State& state) {
  clustergen::Rng rng(3);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(clustergen::kmeans(x, 6, rng));
}
BENCHMARK(BM_KMeans)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
