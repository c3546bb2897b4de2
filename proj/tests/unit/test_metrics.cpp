#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "clustergen/errors.hpp"
#include "clustergen/metrics.hpp"
#include "oracles.hpp"

using namespace clustergen;
using Eigen::MatrixXd;

namespace {

std::vector<int> random_labels(int n, int k, Rng& rng) {
  std::uniform_int_distribution<int> u(0, k - 1);
  std::vector<int> l(static_cast<std::size_t>(n));
  for (int& v : l) v = u(rng);
  return l;
}

MatrixXd two_blobs(int n, double distance, Rng& rng, std::vector<int>* labels) {
  std::normal_distribution<double> g;
  MatrixXd x(2 * n, 2);
  labels->assign(2 * n, 0);
  for (int r = 0; r < 2 * n; ++r) {
    x(r, 0) = g(rng) + (r >= n ? distance : 0.0);
    x(r, 1) = g(rng);
    (*labels)[r] = r >= n;
  }
  return x;
}

}  // namespace

TEST(Labeling, CompactsLabels) {
  const std::vector<int> raw{7, 7, -2, 9, -2};
  const auto l = Labeling::from(raw);
  EXPECT_EQ(l.k(), 3);
  EXPECT_EQ(l.labels(), (std::vector<int>{0, 0, 1, 2, 1}));
  EXPECT_EQ(l.class_sizes(), (std::vector<int>{2, 2, 1}));
}

TEST(Ami, IdenticalAndPermutedAreOne) {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    auto a = random_labels(40, 4, rng);
    auto b = a;
    for (int& v : b) v = (v + 1) % 4;
    EXPECT_NEAR(ami(Labeling::from(a), Labeling::from(a)), 1.0, 1e-12);
    EXPECT_NEAR(ami(Labeling::from(a), Labeling::from(b)), 1.0, 1e-12);
    EXPECT_NEAR(ari(Labeling::from(a), Labeling::from(b)), 1.0, 1e-12);
  }
}

TEST(Ami, SixPointCaseAgainstBruteForce) {
  const std::vector<int> a{0, 0, 0, 1, 1, 1}, b{0, 0, 1, 1, 2, 2};
  // The permutation average is the definition of the expected MI.
  EXPECT_NEAR(oracle::expected_mi_permutations(a, b), oracle::expected_mi_hypergeometric(a, b), 1e-12);
  EXPECT_NEAR(ami(Labeling::from(a), Labeling::from(b)), oracle::ami(a, b), 1e-10);
}

TEST(Ami, HypergeometricOracleMatchesPermutationAverage) {
  Rng rng(2);
  for (int t = 0; t < 30; ++t) {
    const int n = 3 + t % 6;
    const auto a = random_labels(n, 3, rng), b = random_labels(n, 2 + t % 3, rng);
    EXPECT_NEAR(oracle::expected_mi_permutations(a, b), oracle::expected_mi_hypergeometric(a, b), 1e-12);
  }
}

TEST(Ami, SymmetricAndMatchesOracle) {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto a = random_labels(30, 3, rng), b = random_labels(30, 4, rng);
    const double v = ami(Labeling::from(a), Labeling::from(b));
    EXPECT_NEAR(v, ami(Labeling::from(b), Labeling::from(a)), 1e-12);
    EXPECT_NEAR(v, oracle::ami(a, b), 1e-10);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Ami, LengthMismatch) {
  const std::vector<int> a{0, 1}, b{0, 1, 1};
  EXPECT_THROW(ami(Labeling::from(a), Labeling::from(b)), Error);
  EXPECT_THROW(ari(Labeling::from(a), Labeling::from(b)), Error);
}

TEST(Ari, MatchesPairCountingAndNullMean) {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    const auto a = random_labels(25, 3, rng), b = random_labels(25, 3, rng);
    EXPECT_NEAR(ari(Labeling::from(a), Labeling::from(b)), oracle::ari(a, b), 1e-12);
  }
  const auto a = random_labels(10000, 5, rng), b = random_labels(10000, 5, rng);
  EXPECT_LE(std::abs(ari(Labeling::from(a), Labeling::from(b))), 0.02);
}

TEST(Silhouette, FarBlobsNearOneAndSplitNearZero) {
  Rng rng(5);
  std::vector<int> labels;
  const MatrixXd far = two_blobs(100, 100.0, rng, &labels);
  EXPECT_GT(silhouette(far, Labeling::from(labels)), 0.9);
  EXPECT_NEAR(silhouette(far, Labeling::from(labels)), oracle::silhouette(far, labels), 1e-12);
  const MatrixXd one = two_blobs(150, 0.0, rng, &labels);
  const auto split = random_labels(300, 2, rng);
  EXPECT_NEAR(silhouette(one, Labeling::from(split)), 0.0, 0.05);
}

TEST(Silhouette, DecreasesAsBlobsApproach) {
  double prev = 2.0;
  for (double d : {12.0, 8.0, 5.0, 3.0, 1.5}) {
    double mean = 0;
    for (int s = 0; s < 5; ++s) {
      Rng rng(10 + s);
      std::vector<int> labels;
      const MatrixXd x = two_blobs(100, d, rng, &labels);
      mean += silhouette(x, Labeling::from(labels)) / 5;
    }
    EXPECT_LT(mean, prev) << d;
    prev = mean;
  }
}

TEST(Silhouette, SingletonsAndErrors) {
  MatrixXd x(3, 1);
  x << 0, 1, 5;
  const std::vector<int> l{0, 0, 1};
  EXPECT_NEAR(silhouette(x, Labeling::from(l)), oracle::silhouette(x, l), 1e-15);
  const std::vector<int> one{0, 0, 0};
  EXPECT_THROW(silhouette(x, Labeling::from(one)), Error);
}

TEST(KMeans, RecoversSeparatedBlobs) {
  Rng rng(6);
  std::vector<int> labels;
  const MatrixXd x = two_blobs(100, 20.0, rng, &labels);
  const auto r = kmeans(x, 2, rng);
  EXPECT_NEAR(ari(r.labeling, Labeling::from(labels)), 1.0, 1e-12);
}

TEST(KMeans, TrivialK) {
  Rng rng(7);
  std::vector<int> labels;
  const MatrixXd x = two_blobs(10, 3.0, rng, &labels);
  const auto one = kmeans(x, 1, rng);
  EXPECT_EQ(one.labeling.k(), 1);
  const auto all = kmeans(x, 20, rng);
  EXPECT_EQ(all.labeling.k(), 20);
  EXPECT_NEAR(all.wcss, 0.0, 1e-20);
  EXPECT_THROW(kmeans(x, 21, rng), Error);
}

TEST(KMeans, DeterministicPerSeed) {
  Rng data(8);
  std::vector<int> labels;
  const MatrixXd x = two_blobs(60, 2.0, data, &labels);
  Rng a(9), b(9);
  EXPECT_EQ(kmeans(x, 3, a).labeling.labels(), kmeans(x, 3, b).labeling.labels());
}

TEST(Contingency, CountsPairs) {
  const std::vector<int> a{0, 0, 1, 1}, b{0, 1, 1, 1};
  const Eigen::MatrixXi t = contingency(Labeling::from(a), Labeling::from(b));
  EXPECT_EQ(t(0, 0), 1);
  EXPECT_EQ(t(0, 1), 1);
  EXPECT_EQ(t(1, 1), 2);
  EXPECT_EQ(t.sum(), 4);
}
