#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "clustergen/model.hpp"
#include "clustergen/random.hpp"

namespace clustergen {

/// Labeled points drawn from a mixture model. Row r of `points` has label
/// labels[r].
struct Dataset {
  Eigen::MatrixXd points;
  std::vector<int> labels;
  std::string archetype_name;

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
};

/// n x dim matrix of i.i.d. draws. Normal clusters are sampled as exact
/// multivariate normals with covariance U diag(sigma^2) U^T; every other
/// family uses the radial scheme center + r * U diag(sigma) u, u uniform on
/// the unit sphere and r the normalized radial length.
Eigen::MatrixXd sample_cluster_points(const Cluster& c, int n, Rng& rng);

/// Radial-scheme draw regardless of family; used for comparisons against the
/// multivariate normal path.
Eigen::MatrixXd sample_cluster_points_radial(const Cluster& c, int n, Rng& rng);

/// group_sizes[j] points with label j, rows shuffled.
Dataset sample_dataset(const MixtureModel& model, Rng& rng);

}  // namespace clustergen
