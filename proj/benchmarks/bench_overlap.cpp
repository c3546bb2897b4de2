#include <benchmark/benchmark.h>

#include <Eigen/QR>

#include "clustergen/overlap.hpp"

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd random_cov(int p, clustergen::Rng& rng) {
  std::normal_distribution<double> g;
  MatrixXd m(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) m(i, j) = g(rng);
  return m * m.transpose() / p + MatrixXd::Identity(p, p);
}

struct Pair {
  VectorXd m1, m2;
  MatrixXd s1, s2;
};

Pair make_pair(int p) {
  clustergen::Rng rng(p);
  Pair x{VectorXd::Zero(p), VectorXd::Constant(p, 3.0 / std::sqrt(p)), random_cov(p, rng), random_cov(p, rng)};
  return x;
}

void BM_LdaOverlap(benchmark::State& state) {
  const Pair x = make_pair(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(clustergen::lda_overlap(x.m1, x.m2, x.s1, x.s2));
}
BENCHMARK(BM_LdaOverlap)->Arg(2)->Arg(10)->Arg(100);

void BM_ExactOverlap(benchmark::State& state) {
  const Pair x = make_pair(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(clustergen::exact_overlap_oracle(x.m1, x.m2, x.s1, x.s2));
}
BENCHMARK(BM_ExactOverlap)->Arg(2)->Arg(10)->Arg(100);

}  // namespace
