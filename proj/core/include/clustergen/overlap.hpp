#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Core>

#include "clustergen/model.hpp"
#include "clustergen/random.hpp"

namespace clustergen {

/// a^T (mu2 - mu1) / (sqrt(a^T S1 a) + sqrt(a^T S2 a)).
/// Throws Error for a zero axis or a covariance that is not SPD.
double separation_quantile(const Eigen::VectorXd& mu1, const Eigen::VectorXd& mu2,
                           const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2,
                           const Eigen::VectorXd& a);

/// Solves ((S1 + S2) / 2) a = mu2 - mu1. Throws Error when the centers
/// coincide or the averaged covariance is singular (condition above 1e12).
Eigen::VectorXd lda_axis(const Eigen::VectorXd& mu1, const Eigen::VectorXd& mu2,
                         const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2);

/// Overlap along the LDA axis.
double lda_overlap(const Eigen::VectorXd& mu1, const Eigen::VectorXd& mu2,
                   const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2);

/// Overlap along the center-to-center axis.
double c2c_overlap(const Eigen::VectorXd& mu1, const Eigen::VectorXd& mu2,
                   const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2);

struct ExactOverlap {
  double alpha = 0.0;
  double q = 0.0;  ///< best separation in the axis family
  double t = 0.5;  ///< family parameter of the best axis
};

/// Minimax overlap of two Gaussian clusters. Maximizes the separation
/// quantile over axes (t S1 + (1 - t) S2)^{-1} (mu2 - mu1), t in (0, 1): a
/// 64-point logit-spaced grid brackets the maximum, golden-section search
/// refines it to |dt| <= tol.
ExactOverlap exact_overlap_search(const Eigen::VectorXd& mu1, const Eigen::VectorXd& mu2,
                                  const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2,
                                  double tol = 1e-6);

inline double exact_overlap_oracle(const Eigen::VectorXd& mu1, const Eigen::VectorXd& mu2,
                                   const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2,
                                   double tol = 1e-6) {
  return exact_overlap_search(mu1, mu2, s1, s2, tol).alpha;
}

struct MonteCarloOverlap {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Empirical minimax overlap: n points per cluster projected on the LDA
/// axis, threshold chosen where the two empirical error rates meet, estimate
/// is their sum. Requires n >= 10^4.
MonteCarloOverlap monte_carlo_overlap(const Cluster& c1, const Cluster& c2, int n, Rng& rng);

/// One row per cluster pair i < j.
struct OverlapReport {
  std::size_t i = 0, j = 0;
  double q_lda = 0.0;
  double alpha_lda = 0.0;
  double alpha_c2c = 0.0;
  std::optional<double> alpha_exact;
};

std::vector<OverlapReport> overlap_report(const MixtureModel& model, bool with_exact = false);

/// Largest pairwise overlap, and for each cluster the largest overlap with
/// any other cluster.
struct OverlapSummary {
  double max_pairwise = 0.0;
  std::vector<double> max_neighbor;
};
OverlapSummary summarize(const std::vector<OverlapReport>& report, std::size_t n_clusters);

/// Header "i,j,q_lda,alpha_lda,alpha_c2c,alpha_exact"; alpha_exact is
/// empty when not computed.
void write_overlap_csv(std::ostream& out, const std::vector<OverlapReport>& report);

}  // namespace clustergen
