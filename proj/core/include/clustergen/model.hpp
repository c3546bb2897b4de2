#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "clustergen/distribution.hpp"

namespace clustergen {

/// One ellipsoidal cluster. Columns of `axes` are the principal directions,
/// `axis_lengths[j]` the length along column j.
struct Cluster {
  Eigen::VectorXd center;
  Eigen::MatrixXd axes;
  Eigen::VectorXd axis_lengths;
  DistributionSpec distribution;

  int dim() const { return static_cast<int>(center.size()); }
};

/// axes * diag(lengths^2) * axes^T.
Eigen::MatrixXd covariance_of(const Cluster& c);

/// Concrete mixture geometry sampled from an archetype. The model carries
/// no class weights: group_sizes fixes the number of points per cluster.
struct MixtureModel {
  std::vector<Cluster> clusters;
  std::vector<int> group_sizes;
  std::string archetype_name;

  std::size_t size() const { return clusters.size(); }
  int dim() const { return clusters.empty() ? 0 : clusters.front().dim(); }
};

/// axes are written row-major as nested arrays.
nlohmann::json model_to_json(const MixtureModel& m);
MixtureModel model_from_json(const nlohmann::json& j);

}  // namespace clustergen
