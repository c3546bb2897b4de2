#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "clustergen/random.hpp"

namespace clustergen {

/// Cluster assignment with labels compacted to 0..k-1, every class nonempty.
class Labeling {
 public:
  Labeling() = default;
  /// Relabels arbitrary integer labels to 0..k-1 by first appearance.
  static Labeling from(std::span<const int> raw);

  const std::vector<int>& labels() const noexcept { return labels_; }
  int k() const noexcept { return k_; }
  std::size_t size() const noexcept { return labels_.size(); }
  std::vector<int> class_sizes() const;

 private:
  std::vector<int> labels_;
  int k_ = 0;
};

struct KMeansOptions {
  int n_init = 10;
  int max_iter = 300;
  double tol = 1e-6;  ///< relative WCSS change that ends Lloyd iterations
};

struct KMeansResult {
  Labeling labeling;
  Eigen::MatrixXd centroids;
  double wcss = 0.0;
};

/// Lloyd's algorithm from k-means++ seeds, best of n_init runs by WCSS.
KMeansResult kmeans(const Eigen::MatrixXd& x, int k, Rng& rng, const KMeansOptions& options = {});

/// Contingency table n_ij between two labelings of equal length.
Eigen::MatrixXi contingency(const Labeling& a, const Labeling& b);

/// Adjusted mutual information with arithmetic-mean normalization and the
/// hypergeometric expected mutual information.
double ami(const Labeling& a, const Labeling& b);

/// Adjusted Rand index.
double ari(const Labeling& a, const Labeling& b);

/// Mean silhouette coefficient over all points; singletons score 0.
double silhouette(const Eigen::MatrixXd& x, const Labeling& labels);

}  // namespace clustergen
