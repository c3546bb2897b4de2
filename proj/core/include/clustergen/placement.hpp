#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "clustergen/model.hpp"
#include "clustergen/random.hpp"

namespace clustergen {

struct PlacementConfig {
  /// Target fraction of the initialization ball filled by clusters in 2D.
  double rho_2d = 0.10;
  /// SGD step size. Unset means 0.1 * reference_scale^2; the loss is
  /// dimensionless and its gradient has units of 1 / length.
  std::optional<double> learning_rate;
  /// Penalty mix: 1 is linear, 0 quadratic.
  double lambda = 0.5;
  int max_epochs = 1000;
  double loss_tolerance = 0.0;
  /// Re-initializations attempted by sample_mixture_model after a
  /// non-converged run.
  int max_restarts = 3;
};

/// Admissible separation window derived from the overlap bounds.
struct OverlapBounds {
  double q_min = 0.0;  ///< separation at alpha = max_overlap
  double q_max = 0.0;  ///< separation at alpha = min_overlap

  static OverlapBounds from_overlaps(double max_overlap, double min_overlap);
};

/// Numerical slack added to loss_tolerance when testing for convergence.
inline constexpr double kLossSlack = 1e-12;

/// dim * 2^(1-dim) * rho_2d.
double adjusted_density(int dim, double rho_2d);

/// Volume of the unit ball in `dim` dimensions.
double unit_ball_volume(int dim);

/// Radius of the ball whose volume V satisfies sum(cluster volumes) / V =
/// adjusted_density(dim, rho_2d).
double init_ball_radius(int dim, std::span<const double> cluster_radii, double rho_2d);

/// k centers drawn uniformly from the initialization ball.
std::vector<Eigen::VectorXd> init_centers(int k, int dim, std::span<const double> cluster_radii,
                                          const PlacementConfig& config, Rng& rng);

/// lambda * x + (1 - lambda) * x^2.
double penalty(double x, double lambda);
double penalty_derivative(double x, double lambda);

/// Separation between clusters i and j on their LDA axis, oriented from i to
/// j, so the value is nonnegative and symmetric in (i, j).
double pair_separation(const MixtureModel& model, std::size_t i, std::size_t j);

/// Loss on cluster i: penalized excess of its nearest-neighbor separation
/// over q_max plus penalized shortfalls below q_min for every other cluster.
double single_cluster_loss(std::size_t i, const MixtureModel& model, const OverlapBounds& bounds,
                           double lambda);

/// Mean of single_cluster_loss over all clusters.
double overlap_loss(const MixtureModel& model, const OverlapBounds& bounds, double lambda);

/// Gradient of single_cluster_loss(i) with respect to every center, with the
/// LDA axes held fixed at the current centers. Entry j is d l_i / d mu_j.
std::vector<Eigen::VectorXd> loss_gradient(std::size_t i, const MixtureModel& model,
                                           const OverlapBounds& bounds, double lambda);

struct PlacementResult {
  MixtureModel model;
  /// trace[0] is the initial loss, trace[e] the loss after epoch e.
  std::vector<double> trace;
  int epochs = 0;
};

/// Per-cluster SGD on the overlap loss, visiting clusters in a fresh random
/// order each epoch. Only centers move. Throws NonConvergenceError when the
/// loss is still above tolerance after max_epochs. `reference_scale` is the typical
/// cluster length and sets the default learning rate.
PlacementResult optimize_centers(MixtureModel model, const OverlapBounds& bounds,
                                 const PlacementConfig& config, Rng& rng,
                                 double reference_scale = 1.0);

/// CSV with header "epoch,loss".
void write_trace_csv(std::ostream& out, const std::vector<double>& trace);

}  // namespace clustergen
