#include <benchmark/benchmark.h>

#include "clustergen/archetype.hpp"
#include "clustergen/mixture.hpp"
#include "clustergen/sampling.hpp"

namespace {

clustergen::Archetype archetype(int k, int dim) {
  clustergen::Archetype a;
  a.name = "bench";
  a.n_clusters = k;
  a.dim = dim;
  a.n_samples = 100 * k;
  return a;
}

// Full model draw: shapes plus center placement.
void BM_SampleMixtureModel(benchmark::State& state) {
  const auto a = archetype(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    clustergen::Rng rng(seed++);
    benchmark::DoNotOptimize(clustergen::sample_mixture_model(a, rng));
  }
}
BENCHMARK(BM_SampleMixtureModel)->Args({6, 2})->Args({12, 2})->Args({7, 10})->Args({4, 100})->Unit(benchmark::kMillisecond);

void BM_SampleDataset(benchmark::State& state) {
  const auto a = archetype(6, static_cast<int>(state.range(0)));
  clustergen::Rng rng(1);
  const auto model = clustergen::sample_mixture_model(a, rng);
  for (auto _ : state) benchmark::DoNotOptimize(clustergen::sample_dataset(model, rng));
  state.SetItemsProcessed(state.iterations() * a.n_samples);
}
BENCHMARK(BM_SampleDataset)->Arg(2)->Arg(10)->Arg(100);

}  // namespace
