#include "clustergen/placement.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Cholesky>

#include "clustergen/errors.hpp"
#include "clustergen/normal.hpp"

namespace clustergen {

OverlapBounds OverlapBounds::from_overlaps(double max_overlap, double min_overlap) {
  OverlapBounds b;
  b.q_min = separation_from_overlap(max_overlap);
  b.q_max = separation_from_overlap(min_overlap);
  return b;
}

double adjusted_density(int dim, double rho_2d) {
  return dim * std::exp2(1.0 - dim) * rho_2d;
}

double unit_ball_volume(int dim) {
  const double p = dim;
  return std::exp(0.5 * p * std::log(M_PI) - std::lgamma(0.5 * p + 1.0));
}

double init_ball_radius(int dim, std::span<const double> cluster_radii, double rho_2d) {
  // R^dim = sum(r_i^dim) / rho_adj, evaluated in log space for large dim.
  double peak = -std::numeric_limits<double>::infinity();
  for (double r : cluster_radii) peak = std::max(peak, dim * std::log(r));
  double acc = 0.0;
  for (double r : cluster_radii) acc += std::exp(dim * std::log(r) - peak);
  const double log_r_dim = peak + std::log(acc) - std::log(adjusted_density(dim, rho_2d));
  return std::exp(log_r_dim / dim);
}

std::vector<Eigen::VectorXd> init_centers(int k, int dim, std::span<const double> cluster_radii,
                                          const PlacementConfig& config, Rng& rng) {
  const double radius = init_ball_radius(dim, cluster_radii, config.rho_2d);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif;
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXd v(dim);
    do {
      for (int d = 0; d < dim; ++d) v[d] = gauss(rng);
    } while (v.squaredNorm() == 0.0);
    const double r = radius * std::pow(unif(rng), 1.0 / dim);
    out.push_back(v.normalized() * r);
  }
  return out;
}

double penalty(double x, double lambda) { return lambda * x + (1.0 - lambda) * x * x; }

double penalty_derivative(double x, double lambda) { return lambda + 2.0 * (1.0 - lambda) * x; }

namespace {

// Covariances and Cholesky factors of the pair-averaged covariances. Axes and
// lengths never change during placement, so these are computed once.
class PairCache {
 public:
  explicit PairCache(const MixtureModel& model) : k_(model.size()) {
    cov_.reserve(k_);
    for (const auto& c : model.clusters) cov_.push_back(covariance_of(c));
    llt_.resize(k_ * k_);
    for (std::size_t i = 0; i < k_; ++i) {
      for (std::size_t j = i + 1; j < k_; ++j) {
        Eigen::LLT<Eigen::MatrixXd> f(0.5 * (cov_[i] + cov_[j]));
        if (f.info() != Eigen::Success) throw Error("cluster covariance is not positive definite");
        llt_[i * k_ + j] = std::move(f);
      }
    }
  }

  const Eigen::LLT<Eigen::MatrixXd>& llt(std::size_t i, std::size_t j) const {
    return i < j ? llt_[i * k_ + j] : llt_[j * k_ + i];
  }
  const Eigen::MatrixXd& cov(std::size_t i) const { return cov_[i]; }

 private:
  std::size_t k_;
  std::vector<Eigen::MatrixXd> cov_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> llt_;
};

struct PairTerms {
  double q = 0.0;
  Eigen::VectorXd dq_dmu_j;  // equals -dq/dmu_i
};

PairTerms pair_terms(const std::vector<Eigen::VectorXd>& mu, const PairCache& cache, std::size_t i,
                     std::size_t j, bool with_gradient) {
  const Eigen::VectorXd delta = mu[j] - mu[i];
  const Eigen::VectorXd a = cache.llt(i, j).solve(delta);
  const double d = std::sqrt(a.dot(cache.cov(i) * a)) + std::sqrt(a.dot(cache.cov(j) * a));
  PairTerms t;
  if (!(d > 0.0)) {
    // Coincident centers: no separation and no defined direction.
    t.q = 0.0;
    if (with_gradient) t.dq_dmu_j = Eigen::VectorXd::Zero(delta.size());
    return t;
  }
  t.q = a.dot(delta) / d;
  if (with_gradient) t.dq_dmu_j = a / d;
  return t;
}

double cluster_loss(std::size_t i, const std::vector<Eigen::VectorXd>& mu, const PairCache& cache,
                    const OverlapBounds& bounds, double lambda,
                    std::vector<Eigen::VectorXd>* grad) {
  const std::size_t k = mu.size();
  const bool want = grad != nullptr;
  if (want) {
    grad->assign(k, Eigen::VectorXd::Zero(mu[i].size()));
  }
  double loss = 0.0;
  double q_near = std::numeric_limits<double>::infinity();
  std::size_t near = i;
  Eigen::VectorXd near_dir;
  for (std::size_t j = 0; j < k; ++j) {
    if (j == i) continue;
    PairTerms t = pair_terms(mu, cache, i, j, want);
    if (t.q < q_near) {
      q_near = t.q;
      near = j;
      if (want) near_dir = t.dq_dmu_j;
    }
    const double short_by = bounds.q_min - t.q;
    if (short_by > 0.0) {
      loss += penalty(short_by, lambda);
      if (want) {
        const double w = penalty_derivative(short_by, lambda);
        (*grad)[j] -= w * t.dq_dmu_j;
        (*grad)[i] += w * t.dq_dmu_j;
      }
    }
  }
  const double excess = q_near - bounds.q_max;
  if (near != i && excess > 0.0) {
    loss += penalty(excess, lambda);
    if (want) {
      const double w = penalty_derivative(excess, lambda);
      (*grad)[near] += w * near_dir;
      (*grad)[i] -= w * near_dir;
    }
  }
  return loss;
}

std::vector<Eigen::VectorXd> centers_of(const MixtureModel& model) {
  std::vector<Eigen::VectorXd> mu;
  mu.reserve(model.size());
  for (const auto& c : model.clusters) mu.push_back(c.center);
  return mu;
}

double mean_loss(const std::vector<Eigen::VectorXd>& mu, const PairCache& cache,
                 const OverlapBounds& bounds, double lambda) {
  double sum = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) sum += cluster_loss(i, mu, cache, bounds, lambda, nullptr);
  return sum / static_cast<double>(mu.size());
}

}  // namespace

double pair_separation(const MixtureModel& model, std::size_t i, std::size_t j) {
  const Eigen::MatrixXd si = covariance_of(model.clusters[i]);
  const Eigen::MatrixXd sj = covariance_of(model.clusters[j]);
  const Eigen::VectorXd delta = model.clusters[j].center - model.clusters[i].center;
  const Eigen::VectorXd a = (0.5 * (si + sj)).llt().solve(delta);
  const double d = std::sqrt(a.dot(si * a)) + std::sqrt(a.dot(sj * a));
  return d > 0.0 ? a.dot(delta) / d : 0.0;
}

double single_cluster_loss(std::size_t i, const MixtureModel& model, const OverlapBounds& bounds,
                           double lambda) {
  const PairCache cache(model);
  return cluster_loss(i, centers_of(model), cache, bounds, lambda, nullptr);
}

double overlap_loss(const MixtureModel& model, const OverlapBounds& bounds, double lambda) {
  if (model.size() < 2) return 0.0;
  const PairCache cache(model);
  return mean_loss(centers_of(model), cache, bounds, lambda);
}

std::vector<Eigen::VectorXd> loss_gradient(std::size_t i, const MixtureModel& model,
                                           const OverlapBounds& bounds, double lambda) {
  const PairCache cache(model);
  std::vector<Eigen::VectorXd> grad;
  cluster_loss(i, centers_of(model), cache, bounds, lambda, &grad);
  return grad;
}

PlacementResult optimize_centers(MixtureModel model, const OverlapBounds& bounds,
                                 const PlacementConfig& config, Rng& rng, double reference_scale) {
  if (!(config.lambda >= 0.0 && config.lambda <= 1.0))
    throw ValidationError({"lambda must be in [0, 1] (got " + std::to_string(config.lambda) + ")"});
  const double eta = config.learning_rate.value_or(0.1 * reference_scale * reference_scale);
  if (!(eta > 0.0)) throw ValidationError({"learning_rate must be > 0 (got " + std::to_string(eta) + ")"});
  if (config.max_epochs < 1) throw ValidationError({"max_epochs must be >= 1"});

  PlacementResult result;
  if (model.size() < 2) {
    result.trace.push_back(0.0);
    result.model = std::move(model);
    return result;
  }

  const PairCache cache(model);
  std::vector<Eigen::VectorXd> mu = centers_of(model);
  const double target = config.loss_tolerance + kLossSlack;
  double loss = mean_loss(mu, cache, bounds, config.lambda);
  result.trace.push_back(loss);

  std::vector<std::size_t> order(mu.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Eigen::VectorXd> grad;
  int epoch = 0;
  while (loss > target && epoch < config.max_epochs) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      if (cluster_loss(i, mu, cache, bounds, config.lambda, &grad) == 0.0) continue;
      for (std::size_t j = 0; j < mu.size(); ++j) mu[j] -= eta * grad[j];
    }
    ++epoch;
    loss = mean_loss(mu, cache, bounds, config.lambda);
    result.trace.push_back(loss);
  }
  if (loss > target) throw NonConvergenceError(loss, std::move(result.trace));

  for (std::size_t j = 0; j < mu.size(); ++j) model.clusters[j].center = mu[j];
  result.model = std::move(model);
  result.epochs = epoch;
  return result;
}

void write_trace_csv(std::ostream& out, const std::vector<double>& trace) {
  out << "epoch,loss\n";
  char buf[32];
  for (std::size_t e = 0; e < trace.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%.17g", trace[e]);
    out << e << ',' << buf << '\n';
  }
}

}  // namespace clustergen
