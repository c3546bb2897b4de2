#include "clustergen/mixture.hpp"

#include <random>

#include <Eigen/QR>

#include "clustergen/errors.hpp"

namespace clustergen {

Eigen::MatrixXd sample_orientation(int dim, Rng& rng) {
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd g(dim, dim);
  for (int c = 0; c < dim; ++c)
    for (int r = 0; r < dim; ++r) g(r, c) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < dim; ++c)
    if (r(c, c) < 0.0) q.col(c) = -q.col(c);
  return q;
}

MixtureModel sample_mixture_model(const Archetype& a, Rng& rng, const PlacementConfig& config) {
  require_valid(a);
  MixtureModel model;
  model.archetype_name = a.name;
  model.group_sizes = sample_group_sizes(a, rng);
  const auto aspects = sample_aspect_ratios(a, rng);
  const auto radii = sample_cluster_radii(a, rng);
  const auto dists = assign_distributions(a, rng);

  model.clusters.resize(static_cast<std::size_t>(a.n_clusters));
  for (int i = 0; i < a.n_clusters; ++i) {
    Cluster& c = model.clusters[static_cast<std::size_t>(i)];
    c.axes = sample_orientation(a.dim, rng);
    const auto lengths = sample_axis_lengths(aspects[i], radii[i], a.dim, rng);
    c.axis_lengths = Eigen::Map<const Eigen::VectorXd>(lengths.data(), a.dim);
    c.distribution = dists[static_cast<std::size_t>(i)];
    c.center = Eigen::VectorXd::Zero(a.dim);
  }
  if (a.n_clusters == 1) return model;

  const auto bounds = OverlapBounds::from_overlaps(a.max_overlap, a.min_overlap);
  for (int attempt = 0;; ++attempt) {
    const auto centers = init_centers(a.n_clusters, a.dim, radii, config, rng);
    for (int i = 0; i < a.n_clusters; ++i) model.clusters[static_cast<std::size_t>(i)].center = centers[i];
    try {
      return optimize_centers(model, bounds, config, rng, a.scale).model;
    } catch (const NonConvergenceError&) {
      if (attempt >= config.max_restarts) throw;
    }
  }
}

}  // namespace clustergen
