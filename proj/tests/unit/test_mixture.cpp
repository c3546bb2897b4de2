#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "clustergen/mixture.hpp"
#include "clustergen/overlap.hpp"

using namespace clustergen;

TEST(Orientation, OrthonormalInLowAndHighDimension) {
  for (int dim : {2, 3, 10, 100}) {
    Rng rng(dim);
    const Eigen::MatrixXd u = sample_orientation(dim, rng);
    EXPECT_LE((u.transpose() * u - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Orientation, DifferentSeedsDiffer) {
  Rng a(1), b(2);
  EXPECT_GT((sample_orientation(3, a) - sample_orientation(3, b)).norm(), 1e-3);
}

TEST(Orientation, FirstColumnIsUniformOnTheCircle) {
  // Haar measure on O(2): the angle of the first column is uniform.
  Rng rng(3);
  std::vector<int> bins(8, 0);
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXd u = sample_orientation(2, rng);
    const double th = std::atan2(u(1, 0), u(0, 0)) + M_PI;
    ++bins[std::min(7, static_cast<int>(th / (2 * M_PI) * 8))];
  }
  for (int c : bins) EXPECT_NEAR(c, n / 8.0, 5 * std::sqrt(n / 8.0));
}

TEST(Covariance, DiagonalAndRotated) {
  Cluster c;
  c.center = Eigen::Vector2d::Zero();
  c.axes = Eigen::Matrix2d::Identity();
  c.axis_lengths = Eigen::Vector2d(2, 1);
  const Eigen::MatrixXd s = covariance_of(c);
  EXPECT_NEAR(s(0, 0), 4, 1e-15);
  EXPECT_NEAR(s(1, 1), 1, 1e-15);
  EXPECT_NEAR(s(0, 1), 0, 1e-15);

  const double h = std::sqrt(0.5);
  c.axes << h, -h, h, h;
  c.axis_lengths = Eigen::Vector2d(std::sqrt(3.0), 1 / std::sqrt(3.0));
  const Eigen::MatrixXd r = covariance_of(c);
  Eigen::Matrix2d direct = c.axes * Eigen::Vector2d(3.0, 1.0 / 3).asDiagonal() * c.axes.transpose();
  EXPECT_LE((r - direct).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(r(0, 1), (3 - 1.0 / 3) / 2, 1e-14);
}

namespace {

Archetype listing3() {
  Archetype a;
  a.name = "seven_highly_separated_10d_very_different_shapes";
  a.n_clusters = 7;
  a.dim = 10;
  a.n_samples = 700;
  a.aspect_ref = 1.5;
  a.aspect_maxmin = 3.0;
  a.radius_maxmin = 3.0;
  a.imbalance_ratio = 2;
  a.max_overlap = 1e-4;
  a.min_overlap = 1e-5;
  a.distributions = {DistributionSpec::with_defaults(Family::kNormal),
                     DistributionSpec::with_defaults(Family::kExponential)};
  return a;
}

}  // namespace

TEST(Mixture, SingleClusterSitsAtTheOrigin) {
  Archetype a;
  a.n_clusters = 1;
  a.n_samples = 50;
  Rng rng(1);
  const auto m = sample_mixture_model(a, rng);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m.clusters[0].center, Eigen::VectorXd::Zero(a.dim));
  EXPECT_EQ(m.group_sizes, std::vector<int>{50});
}

TEST(Mixture, ListingThreeMeetsItsOverlapBounds) {
  const Archetype a = listing3();
  Rng rng(11);
  const auto m = sample_mixture_model(a, rng);
  ASSERT_EQ(m.size(), 7u);
  EXPECT_EQ(m.dim(), 10);
  const auto s = summarize(overlap_report(m), m.size());
  EXPECT_LE(s.max_pairwise, 1e-4 + 1e-9);
  for (double v : s.max_neighbor) EXPECT_GE(v, 1e-5 - 1e-9);
}

TEST(Mixture, ClusterInvariants) {
  const Archetype a = listing3();
  Rng rng(12);
  const auto m = sample_mixture_model(a, rng);
  for (const auto& c : m.clusters) {
    const Eigen::MatrixXd u = c.axes;
    EXPECT_LE((u.transpose() * u - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_GT(c.axis_lengths.minCoeff(), 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(covariance_of(c));
    const auto ev = es.eigenvalues();
    EXPECT_GT(ev.minCoeff(), 0.0);
    // Aspect ratio and geometric mean are recoverable from the covariance.
    const double aspect = c.axis_lengths.maxCoeff() / c.axis_lengths.minCoeff();
    EXPECT_NEAR(std::sqrt(ev.maxCoeff() / ev.minCoeff()), aspect, 1e-6 * aspect);
    Eigen::VectorXd sorted = c.axis_lengths.array().square();
    std::sort(sorted.data(), sorted.data() + sorted.size());
    EXPECT_LE((sorted - ev).cwiseAbs().maxCoeff(), 1e-8 * sorted.maxCoeff());
  }
  EXPECT_EQ(std::accumulate(m.group_sizes.begin(), m.group_sizes.end(), 0), 700);
}

TEST(Mixture, ShapesMatchTheSampledAttributes) {
  // Replays the attribute draws to compare them with the built model.
  const Archetype a = listing3();
  Rng rng(13), replay(13);
  const auto m = sample_mixture_model(a, rng);
  const auto sizes = sample_group_sizes(a, replay);
  const auto aspects = sample_aspect_ratios(a, replay);
  const auto radii = sample_cluster_radii(a, replay);
  EXPECT_EQ(sizes, m.group_sizes);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto& l = m.clusters[i].axis_lengths;
    EXPECT_NEAR(l.maxCoeff() / l.minCoeff(), aspects[i], 1e-6 * aspects[i]);
    EXPECT_NEAR(std::exp(l.array().log().mean()), radii[i], 1e-9 * radii[i]);
  }
}

TEST(Mixture, DeterministicPerSeed) {
  const Archetype a = listing3();
  Rng r1(5), r2(5);
  const auto m1 = sample_mixture_model(a, r1);
  const auto m2 = sample_mixture_model(a, r2);
  EXPECT_EQ(model_to_json(m1).dump(), model_to_json(m2).dump());
}

TEST(Mixture, ModelJsonRoundTrip) {
  Archetype a = listing3();
  a.distributions.push_back({Family::kBeta, {3.0, 1.5}});
  Rng rng(6);
  const auto m = sample_mixture_model(a, rng);
  const auto back = model_from_json(model_to_json(m));
  EXPECT_EQ(model_to_json(back).dump(), model_to_json(m).dump());
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_EQ(back.clusters[i].axes, m.clusters[i].axes);
    EXPECT_EQ(back.clusters[i].center, m.clusters[i].center);
    EXPECT_EQ(back.clusters[i].distribution, m.clusters[i].distribution);
  }
}
