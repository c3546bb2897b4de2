#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace clustergen {

/// Randomly initialized feed-forward network used to bend convex clusters:
/// linear embedding, `kBlocks` blocks of (linear, layer norm, tanh), and a
/// linear projection whose weight is the transpose of the embedding weight.
class DistortNetwork {
 public:
  static constexpr int kBlocks = 16;
  static constexpr int kDefaultWidth = 128;

  DistortNetwork(int input_dim, std::uint64_t seed, int hidden_width = kDefaultWidth);

  int input_dim() const noexcept { return static_cast<int>(embedding_.cols()); }
  int hidden_width() const noexcept { return static_cast<int>(embedding_.rows()); }

  /// H x p embedding weight.
  const Eigen::MatrixXd& embedding_weight() const noexcept { return embedding_; }
  /// p x H projection weight; a view of the same storage as the embedding.
  auto projection_weight() const { return embedding_.transpose(); }

  /// Applies the network row-wise to already standardized inputs.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;

 private:
  struct Block {
    Eigen::MatrixXd weight;
    Eigen::VectorXd bias;
    Eigen::VectorXd gain;
    Eigen::VectorXd offset;
  };

  Eigen::MatrixXd embedding_;
  Eigen::VectorXd embedding_bias_;
  std::vector<Block> blocks_;
  Eigen::VectorXd projection_bias_;
};

/// Standardizes columns, runs the network, then undoes the standardization.
/// Deterministic per seed; output has the input's shape.
Eigen::MatrixXd distort(const Eigen::MatrixXd& x, std::uint64_t seed,
                        int hidden_width = DistortNetwork::kDefaultWidth);

/// Inverse stereographic projection (2x, |x|^2 - 1) / (|x|^2 + 1) of x /
/// prescale. The origin maps to the south pole (0, ..., 0, -1).
Eigen::MatrixXd inverse_stereographic(const Eigen::MatrixXd& x, double prescale = 1.0);

/// Forward stereographic projection from the north pole, scaled back by
/// prescale. Inverse of inverse_stereographic().
Eigen::MatrixXd stereographic(const Eigen::MatrixXd& y, double prescale = 1.0);

/// Median row norm of the column-centered data (1 if that is zero).
double median_centered_norm(const Eigen::MatrixXd& x);

/// Centers the columns, divides by `prescale` (median row norm when unset)
/// and wraps the result onto the unit sphere in one more dimension.
Eigen::MatrixXd wrap_around_sphere(const Eigen::MatrixXd& x,
                                   std::optional<double> prescale = std::nullopt);

}  // namespace clustergen
