#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "clustergen/errors.hpp"
#include "clustergen/overlap.hpp"
#include "oracles.hpp"

using namespace clustergen;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

MatrixXd eye(int p) { return MatrixXd::Identity(p, p); }

MatrixXd rotation(int p, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixXd m(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) m(i, j) = g(rng);
  Eigen::HouseholderQR<MatrixXd> qr(m);
  return qr.householderQ();
}

}  // namespace

TEST(Separation, HandEvaluated) {
  EXPECT_DOUBLE_EQ(separation_quantile(vec({0, 0}), vec({2, 0}), eye(2), eye(2), vec({1, 0})), 1.0);
  EXPECT_DOUBLE_EQ(separation_quantile(vec({0, 0}), vec({2, 0}), eye(2), eye(2), vec({7, 0})), 1.0);
  EXPECT_DOUBLE_EQ(separation_quantile(vec({0, 0}), vec({2, 0}), eye(2), eye(2), vec({-1, 0})), -1.0);
}

TEST(Separation, MatchesRawQuadraticForms) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int t = 0; t < 50; ++t) {
    VectorXd m1(5), m2(5), a(5);
    for (int i = 0; i < 5; ++i) {
      m1[i] = g(rng);
      m2[i] = g(rng);
      a[i] = g(rng);
    }
    const MatrixXd s1 = oracle::random_spd(5, 2.0, 1.0, rng), s2 = oracle::random_spd(5, 3.0, 0.7, rng);
    EXPECT_NEAR(separation_quantile(m1, m2, s1, s2, a), oracle::quantile(m2 - m1, s1, s2, a), 1e-12);
  }
}

TEST(Separation, RejectsZeroAxisAndIndefiniteCovariance) {
  EXPECT_THROW(separation_quantile(vec({0, 0}), vec({1, 0}), eye(2), eye(2), vec({0, 0})), Error);
  MatrixXd bad = eye(2);
  bad(1, 1) = -1;
  EXPECT_THROW(separation_quantile(vec({0, 0}), vec({1, 0}), bad, eye(2), vec({1, 0})), Error);
}

TEST(LdaAxis, SolvesTheAveragedSystem) {
  EXPECT_LE((lda_axis(vec({0, 0}), vec({3, 4}), eye(2), eye(2)) - vec({3, 4})).norm(), 1e-14);
  EXPECT_LE((lda_axis(vec({0, 0}), vec({1, 0}), 2 * eye(2), 4 * eye(2)) - vec({1.0 / 3, 0})).norm(), 1e-14);
  std::mt19937_64 rng(2);
  const MatrixXd s1 = oracle::random_spd(6, 3.0, 1.0, rng), s2 = oracle::random_spd(6, 2.0, 2.0, rng);
  const VectorXd d = VectorXd::LinSpaced(6, -1, 2);
  const VectorXd a = lda_axis(VectorXd::Zero(6), d, s1, s2);
  EXPECT_LE((0.5 * (s1 + s2) * a - d).norm(), 1e-8 * d.norm());
}

TEST(LdaAxis, Errors) {
  MatrixXd zero = MatrixXd::Zero(2, 2);
  MatrixXd s1(2, 2);
  s1 << 4, 0, 0, 1;
  EXPECT_THROW(lda_axis(vec({0, 0}), vec({1, 0}), s1, zero), Error);
  EXPECT_THROW(lda_axis(vec({1, 1}), vec({1, 1}), eye(2), eye(2)), Error);
  MatrixXd nearly(2, 2);
  nearly << 1, 0, 0, 1e-14;
  EXPECT_THROW(lda_axis(vec({0, 0}), vec({1, 0}), nearly, nearly), Error);
}

TEST(LdaOverlap, UnitSeparationAndSymmetry) {
  EXPECT_NEAR(lda_overlap(vec({0, 0}), vec({2, 0}), eye(2), eye(2)), 2 * (1 - oracle::phi(1)), 1e-14);
  std::mt19937_64 rng(3);
  const MatrixXd s1 = oracle::random_spd(3, 2.5, 1.0, rng), s2 = oracle::random_spd(3, 1.5, 1.3, rng);
  const VectorXd m1 = vec({0.1, 0.2, 0.3}), m2 = vec({1.5, -0.5, 2});
  EXPECT_NEAR(lda_overlap(m1, m2, s1, s2), lda_overlap(m2, m1, s2, s1), 1e-14);
}

TEST(LdaOverlap, DecreasesWithDistance) {
  std::mt19937_64 rng(4);
  const MatrixXd s1 = oracle::random_spd(4, 3.0, 1.0, rng), s2 = oracle::random_spd(4, 2.0, 1.0, rng);
  const VectorXd dir = vec({1, -2, 0.5, 1}).normalized();
  double prev = 2.0;
  for (double t = 0.1; t <= 12; t += 0.1) {
    const double a = lda_overlap(VectorXd::Zero(4), t * dir, s1, s2);
    EXPECT_LT(a, prev) << t;
    prev = a;
  }
}

TEST(C2cOverlap, SphericalHandCase) {
  // sigma1 = 1, sigma2 = 2, |delta| = 3: q = 9 / (3 + 6) = 1.
  EXPECT_NEAR(c2c_overlap(vec({0, 0}), vec({3, 0}), eye(2), 4 * eye(2)), 2 * (1 - oracle::phi(1)), 1e-14);
  EXPECT_NEAR(c2c_overlap(vec({0, 0}), vec({1, 2}), eye(2), eye(2)), lda_overlap(vec({0, 0}), vec({1, 2}), eye(2), eye(2)),
              1e-15);
}

TEST(ExactOverlap, MatchesTwoDimensionalDirectionSweep) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 40; ++t) {
    const MatrixXd s1 = oracle::random_spd(2, 3.0, 1.0, rng), s2 = oracle::random_spd(2, 2.0, 1.5, rng);
    const VectorXd d = vec({2.0 + t * 0.1, 1.0});
    const double ours = exact_overlap_oracle(VectorXd::Zero(2), d, s1, s2);
    const double ref = oracle::exact_overlap_2d(Eigen::Vector2d::Zero(), d, s1, s2);
    EXPECT_NEAR(ours / ref, 1.0, 1e-6) << t;
  }
}

TEST(ExactOverlap, MatchesSphereSearchInFiveDimensions) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 5; ++t) {
    const MatrixXd s1 = oracle::random_spd(5, 3.0, 1.0, rng), s2 = oracle::random_spd(5, 3.0, 0.6, rng);
    const VectorXd d = vec({2, 1, 0, -1, 0.5});
    const double ours = exact_overlap_oracle(VectorXd::Zero(5), d, s1, s2);
    const double ref = oracle::exact_overlap_sphere_search(VectorXd::Zero(5), d, s1, s2);
    EXPECT_NEAR(ours / ref, 1.0, 1e-5) << t;
  }
}

TEST(ExactOverlap, EqualsLdaForProportionalCovariances) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    const MatrixXd s2 = oracle::random_spd(3, 2.5, 1.0, rng);
    const MatrixXd s1 = (0.3 + 0.2 * t) * s2;
    const VectorXd d = vec({1.5, 0.5, -1});
    EXPECT_NEAR(exact_overlap_oracle(VectorXd::Zero(3), d, s1, s2), lda_overlap(VectorXd::Zero(3), d, s1, s2), 1e-6);
  }
}

TEST(ExactOverlap, EqualsC2cForSphericalCovariances) {
  for (double r : {0.5, 1.0, 2.0, 4.0}) {
    const VectorXd d = vec({1.5, 2.5, -1, 0.3});
    EXPECT_NEAR(exact_overlap_oracle(VectorXd::Zero(4), d, eye(4), r * eye(4)),
                c2c_overlap(VectorXd::Zero(4), d, eye(4), r * eye(4)), 1e-6);
  }
}

TEST(ExactOverlap, NeverExceedsLda) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 50; ++t) {
    const MatrixXd s1 = oracle::random_spd(3, 3.0, 1.0, rng), s2 = oracle::random_spd(3, 3.0, 2.0, rng);
    const VectorXd d = vec({2, 0.5, 1});
    const auto e = exact_overlap_search(VectorXd::Zero(3), d, s1, s2);
    const VectorXd a = lda_axis(VectorXd::Zero(3), d, s1, s2);
    EXPECT_GE(e.q, separation_quantile(VectorXd::Zero(3), d, s1, s2, a) - 1e-12);
    EXPECT_LE(e.alpha, lda_overlap(VectorXd::Zero(3), d, s1, s2) + 1e-15);
    EXPECT_GT(e.t, 0.0);
    EXPECT_LT(e.t, 1.0);
  }
}

TEST(Overlap, RotationEquivariance) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 10; ++t) {
    const MatrixXd s1 = oracle::random_spd(4, 2.0, 1.0, rng), s2 = oracle::random_spd(4, 3.0, 1.0, rng);
    const VectorXd m1 = vec({0, 1, 0, 0}), m2 = vec({2, 0, 1, -1});
    const MatrixXd r = rotation(4, rng);
    const MatrixXd rs1 = r * s1 * r.transpose(), rs2 = r * s2 * r.transpose();
    EXPECT_NEAR(lda_overlap(m1, m2, s1, s2), lda_overlap(r * m1, r * m2, rs1, rs2), 1e-10);
    EXPECT_NEAR(c2c_overlap(m1, m2, s1, s2), c2c_overlap(r * m1, r * m2, rs1, rs2), 1e-10);
    EXPECT_NEAR(exact_overlap_oracle(m1, m2, s1, s2), exact_overlap_oracle(r * m1, r * m2, rs1, rs2), 1e-10);
  }
}

namespace {

Cluster gaussian(VectorXd center, VectorXd lengths, Family f = Family::kNormal) {
  Cluster c;
  c.axes = MatrixXd::Identity(center.size(), center.size());
  c.center = std::move(center);
  c.axis_lengths = std::move(lengths);
  c.distribution = DistributionSpec::with_defaults(f);
  return c;
}

}  // namespace

TEST(MonteCarlo, GaussianPairAgreesWithTheory) {
  // Unit spheres at distance 2q with alpha = 0.10.
  const double q = -oracle::phi_inv(0.05);
  const Cluster c1 = gaussian(vec({0, 0}), vec({1, 1}));
  const Cluster c2 = gaussian(vec({2 * q, 0}), vec({1, 1}));
  ASSERT_NEAR(lda_overlap(c1.center, c2.center, covariance_of(c1), covariance_of(c2)), 0.10, 1e-12);
  Rng rng(10);
  const auto mc = monte_carlo_overlap(c1, c2, 100000, rng);
  EXPECT_NEAR(mc.estimate, 0.10, 3 * mc.std_error);
  EXPECT_GT(mc.std_error, 0.0);
}

TEST(MonteCarlo, FarApartIsZero) {
  const Cluster c1 = gaussian(vec({0, 0}), vec({1, 1}));
  const Cluster c2 = gaussian(vec({100, 0}), vec({1, 1}));
  Rng rng(11);
  EXPECT_EQ(monte_carlo_overlap(c1, c2, 10000, rng).estimate, 0.0);
}

TEST(MonteCarlo, RequiresEnoughDraws) {
  const Cluster c1 = gaussian(vec({0, 0}), vec({1, 1}));
  Rng rng(12);
  EXPECT_THROW(monte_carlo_overlap(c1, c1, 9999, rng), ValidationError);
}

TEST(Report, RowsAndCsvHeader) {
  MixtureModel m;
  m.clusters = {gaussian(vec({0, 0}), vec({1, 1})), gaussian(vec({3, 0}), vec({2, 0.5})),
                gaussian(vec({0, 4}), vec({1, 1.5}))};
  m.group_sizes = {1, 1, 1};
  const auto rep = overlap_report(m, true);
  ASSERT_EQ(rep.size(), 3u);
  for (const auto& r : rep) {
    EXPECT_NEAR(r.alpha_lda, 2 * (1 - oracle::phi(r.q_lda)), 1e-12);
    ASSERT_TRUE(r.alpha_exact.has_value());
    EXPECT_LE(*r.alpha_exact, r.alpha_lda + 1e-15);
  }
  std::ostringstream s;
  write_overlap_csv(s, rep);
  EXPECT_EQ(s.str().substr(0, s.str().find('\n')), "i,j,q_lda,alpha_lda,alpha_c2c,alpha_exact");
  const auto sum = summarize(rep, 3);
  EXPECT_EQ(sum.max_neighbor.size(), 3u);
}
