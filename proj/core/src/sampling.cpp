#include "clustergen/sampling.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "clustergen/distribution.hpp"
#include "clustergen/errors.hpp"

namespace clustergen {

namespace {

Eigen::MatrixXd gaussian_matrix(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd z(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) z(r, c) = gauss(rng);
  return z;
}

// Rows of `local` are coordinates in the principal frame, scaled by the axis
// lengths; map them to the ambient frame and shift by the center.
Eigen::MatrixXd to_ambient(const Cluster& c, const Eigen::MatrixXd& local) {
  Eigen::MatrixXd x = (local * c.axis_lengths.asDiagonal()) * c.axes.transpose();
  x.rowwise() += c.center.transpose();
  return x;
}

}  // namespace

Eigen::MatrixXd sample_cluster_points_radial(const Cluster& c, int n, Rng& rng) {
  if (n < 0) throw Error("sample count must be nonnegative");
  const RadialDistribution radial(c.distribution);
  Eigen::MatrixXd u = gaussian_matrix(n, c.dim(), rng);
  for (int r = 0; r < n; ++r) {
    double norm = u.row(r).norm();
    while (norm == 0.0) {
      u.row(r) = gaussian_matrix(1, c.dim(), rng);
      norm = u.row(r).norm();
    }
    u.row(r) *= radial(rng) / norm;
  }
  return to_ambient(c, u);
}

Eigen::MatrixXd sample_cluster_points(const Cluster& c, int n, Rng& rng) {
  if (c.distribution.family != Family::kNormal) return sample_cluster_points_radial(c, n, rng);
  if (n < 0) throw Error("sample count must be nonnegative");
  return to_ambient(c, gaussian_matrix(n, c.dim(), rng));
}

Dataset sample_dataset(const MixtureModel& model, Rng& rng) {
  if (model.group_sizes.size() != model.size())
    throw Error("model has " + std::to_string(model.size()) + " clusters but " +
                std::to_string(model.group_sizes.size()) + " group sizes");
  const int total = std::accumulate(model.group_sizes.begin(), model.group_sizes.end(), 0);
  Eigen::MatrixXd pts(total, model.dim());
  std::vector<int> labels(static_cast<std::size_t>(total));
  int row = 0;
  for (std::size_t j = 0; j < model.size(); ++j) {
    const int m = model.group_sizes[j];
    pts.middleRows(row, m) = sample_cluster_points(model.clusters[j], m, rng);
    std::fill_n(labels.begin() + row, m, static_cast<int>(j));
    row += m;
  }

  std::vector<int> perm(static_cast<std::size_t>(total));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Dataset d;
  d.archetype_name = model.archetype_name;
  d.points.resize(total, model.dim());
  d.labels.resize(labels.size());
  for (int r = 0; r < total; ++r) {
    d.points.row(r) = pts.row(perm[r]);
    d.labels[r] = labels[perm[r]];
  }
  return d;
}

}  // namespace clustergen
