#include "clustergen/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "clustergen/errors.hpp"
#include "clustergen/random.hpp"

namespace clustergen {

namespace {

Eigen::MatrixXd fan_in_normal(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(cols)));
  Eigen::MatrixXd w(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) w(r, c) = gauss(rng);
  return w;
}

// Layer normalization over the feature axis (columns of the row-major batch).
void layer_norm_rows(Eigen::MatrixXd& h, const Eigen::VectorXd& gain, const Eigen::VectorXd& offset) {
  constexpr double kEps = 1e-5;
  const double width = static_cast<double>(h.cols());
  for (Eigen::Index r = 0; r < h.rows(); ++r) {
    const double mean = h.row(r).mean();
    h.row(r).array() -= mean;
    const double var = h.row(r).squaredNorm() / width;
    h.row(r) /= std::sqrt(var + kEps);
  }
  h = (h.array().rowwise() * gain.transpose().array()).rowwise() + offset.transpose().array();
}

}  // namespace

DistortNetwork::DistortNetwork(int input_dim, std::uint64_t seed, int hidden_width) {
  if (input_dim < 1) throw Error("distort needs at least one input dimension");
  if (hidden_width < 1) throw Error("distort hidden width must be positive");
  Rng rng(seed);
  embedding_ = fan_in_normal(hidden_width, input_dim, rng);
  embedding_bias_ = Eigen::VectorXd::Zero(hidden_width);
  blocks_.reserve(kBlocks);
  for (int b = 0; b < kBlocks; ++b) {
    Block blk;
    blk.weight = fan_in_normal(hidden_width, hidden_width, rng);
    blk.bias = Eigen::VectorXd::Zero(hidden_width);
    blk.gain = Eigen::VectorXd::Ones(hidden_width);
    blk.offset = Eigen::VectorXd::Zero(hidden_width);
    blocks_.push_back(std::move(blk));
  }
  projection_bias_ = Eigen::VectorXd::Zero(input_dim);
}

Eigen::MatrixXd DistortNetwork::forward(const Eigen::MatrixXd& x) const {
  if (x.cols() != input_dim()) throw Error("distort input has the wrong number of columns");
  Eigen::MatrixXd h = x * embedding_.transpose();
  h.rowwise() += embedding_bias_.transpose();
  for (const auto& blk : blocks_) {
    Eigen::MatrixXd z = h * blk.weight.transpose();
    z.rowwise() += blk.bias.transpose();
    layer_norm_rows(z, blk.gain, blk.offset);
    h = z.array().tanh().matrix();
  }
  Eigen::MatrixXd y = h * projection_weight().transpose();
  y.rowwise() += projection_bias_.transpose();
  return y;
}

Eigen::MatrixXd distort(const Eigen::MatrixXd& x, std::uint64_t seed, int hidden_width) {
  if (!x.allFinite()) throw Error("distort input contains non-finite values");
  const Eigen::RowVectorXd mean = x.colwise().mean();
  Eigen::MatrixXd z = x.rowwise() - mean;
  Eigen::RowVectorXd sd(x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double v = x.rows() > 1 ? z.col(c).squaredNorm() / static_cast<double>(x.rows() - 1) : 0.0;
    sd[c] = v > 0.0 ? std::sqrt(v) : 1.0;
  }
  z = z.array().rowwise() / sd.array();
  const DistortNetwork net(static_cast<int>(x.cols()), seed, hidden_width);
  Eigen::MatrixXd y = net.forward(z);
  y = y.array().rowwise() * sd.array();
  y.rowwise() += mean;
  return y;
}

Eigen::MatrixXd inverse_stereographic(const Eigen::MatrixXd& x, double prescale) {
  if (!(prescale > 0.0)) throw Error("prescale must be positive");
  const Eigen::Index p = x.cols();
  Eigen::MatrixXd y(x.rows(), p + 1);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const Eigen::RowVectorXd v = x.row(r) / prescale;
    const double s = v.squaredNorm();
    y.row(r).head(p) = 2.0 * v / (s + 1.0);
    y(r, p) = (s - 1.0) / (s + 1.0);
  }
  return y;
}

Eigen::MatrixXd stereographic(const Eigen::MatrixXd& y, double prescale) {
  if (y.cols() < 2) throw Error("stereographic projection needs at least two columns");
  const Eigen::Index p = y.cols() - 1;
  Eigen::MatrixXd x(y.rows(), p);
  for (Eigen::Index r = 0; r < y.rows(); ++r) x.row(r) = prescale * y.row(r).head(p) / (1.0 - y(r, p));
  return x;
}

double median_centered_norm(const Eigen::MatrixXd& x) {
  if (x.rows() == 0) return 1.0;
  const Eigen::MatrixXd z = x.rowwise() - x.colwise().mean();
  std::vector<double> norms(static_cast<std::size_t>(z.rows()));
  for (Eigen::Index r = 0; r < z.rows(); ++r) norms[r] = z.row(r).norm();
  std::sort(norms.begin(), norms.end());
  const std::size_t n = norms.size();
  const double med = n % 2 ? norms[n / 2] : 0.5 * (norms[n / 2 - 1] + norms[n / 2]);
  return med > 0.0 ? med : 1.0;
}

Eigen::MatrixXd wrap_around_sphere(const Eigen::MatrixXd& x, std::optional<double> prescale) {
  if (!x.allFinite()) throw Error("wrap input contains non-finite values");
  const double scale = prescale.value_or(median_centered_norm(x));
  const Eigen::MatrixXd z = x.rowwise() - x.colwise().mean();
  return inverse_stereographic(z, scale);
}

}  // namespace clustergen
