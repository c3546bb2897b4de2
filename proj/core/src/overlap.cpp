#include "clustergen/overlap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include <Eigen/Cholesky>

#include "clustergen/errors.hpp"
#include "clustergen/normal.hpp"
#include "clustergen/sampling.hpp"

namespace clustergen {

namespace {

void require_spd(const Eigen::MatrixXd& s, std::string_view what) {
  if (s.rows() != s.cols() || s.rows() == 0) throw Error(std::string(what) + " must be square");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if (!s.isApprox(s.transpose(), 1e-10) && (s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw Error(std::string(what) + " is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) throw Error(std::string(what) + " is not positive definite");
}

void require_shapes(const Eigen::VectorXd& mu1, const Eigen::VectorXd& mu2, const Eigen::MatrixXd& s1,
                    const Eigen::MatrixXd& s2) {
  const auto p = mu1.size();
  if (mu2.size() != p || s1.rows() != p || s2.rows() != p)
    throw Error("overlap inputs have inconsistent dimensions");
}

double quantile_unchecked(const Eigen::VectorXd& delta, const Eigen::MatrixXd& s1,
                          const Eigen::MatrixXd& s2, const Eigen::VectorXd& a) {
  const double num = a.dot(delta);
  const double den = std::sqrt(a.dot(s1 * a)) + std::sqrt(a.dot(s2 * a));
  return num / den;
}

Eigen::VectorXd family_axis(const Eigen::VectorXd& delta, const Eigen::MatrixXd& s1,
                            const Eigen::MatrixXd& s2, double t) {
  const Eigen::MatrixXd mix = t * s1 + (1.0 - t) * s2;
  return mix.llt().solve(delta);
}

}  // namespace

double separation_quantile(const Eigen::VectorXd& mu1, const Eigen::VectorXd& mu2,
                           const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2,
                           const Eigen::VectorXd& a) {
  require_shapes(mu1, mu2, s1, s2);
  if (a.size() != mu1.size()) throw Error("classification axis has the wrong dimension");
  if (a.squaredNorm() == 0.0) throw Error("classification axis is zero");
  require_spd(s1, "first covariance");
  require_spd(s2, "second covariance");
  return quantile_unchecked(mu2 - mu1, s1, s2, a);
}

Eigen::VectorXd lda_axis(const Eigen::VectorXd& mu1, const Eigen::VectorXd& mu2,
                         const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2) {
  require_shapes(mu1, mu2, s1, s2);
  require_spd(s1, "first covariance");
  require_spd(s2, "second covariance");
  const Eigen::VectorXd delta = mu2 - mu1;
  if (delta.squaredNorm() == 0.0) throw Error("cluster centers coincide; overlap is undefined");
  const Eigen::MatrixXd avg = 0.5 * (s1 + s2);
  Eigen::LLT<Eigen::MatrixXd> llt(avg);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-12)
    throw Error("averaged covariance is singular (condition number above 1e12)");
  return llt.solve(delta);
}

double lda_overlap(const Eigen::VectorXd& mu1, const Eigen::VectorXd& mu2,
                   const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2) {
  const Eigen::VectorXd a = lda_axis(mu1, mu2, s1, s2);
  return overlap_from_separation(quantile_unchecked(mu2 - mu1, s1, s2, a));
}

double c2c_overlap(const Eigen::VectorXd& mu1, const Eigen::VectorXd& mu2,
                   const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2) {
  require_shapes(mu1, mu2, s1, s2);
  require_spd(s1, "first covariance");
  require_spd(s2, "second covariance");
  const Eigen::VectorXd delta = mu2 - mu1;
  if (delta.squaredNorm() == 0.0) throw Error("cluster centers coincide; overlap is undefined");
  return overlap_from_separation(quantile_unchecked(delta, s1, s2, delta));
}

ExactOverlap exact_overlap_search(const Eigen::VectorXd& mu1, const Eigen::VectorXd& mu2,
                                  const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2,
                                  double tol) {
  const Eigen::VectorXd a_lda = lda_axis(mu1, mu2, s1, s2);  // validates inputs
  const Eigen::VectorXd delta = mu2 - mu1;
  auto q_at = [&](double t) {
    const double q = quantile_unchecked(delta, s1, s2, family_axis(delta, s1, s2, t));
    if (!std::isfinite(q)) throw Error("exact overlap search produced a non-finite separation");
    return q;
  };

  // Logit-spaced grid: t_k = 1 / (1 + exp(-s_k)), s_k uniform on [-L, L].
  constexpr int kGrid = 64;
  constexpr double kLogitSpan = 13.815510557964274;  // logit(1 - 1e-6)
  std::array<double, kGrid> ts{};
  std::array<double, kGrid> qs{};
  int best = 0;
  for (int k = 0; k < kGrid; ++k) {
    const double s = -kLogitSpan + 2.0 * kLogitSpan * k / (kGrid - 1);
    ts[k] = 1.0 / (1.0 + std::exp(-s));
    qs[k] = q_at(ts[k]);
    if (qs[k] > qs[best]) best = k;
  }

  double lo = ts[std::max(best - 1, 0)];
  double hi = ts[std::min(best + 1, kGrid - 1)];
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = q_at(x1);
  double f2 = q_at(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = q_at(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = q_at(x1);
    }
  }

  ExactOverlap out;
  out.t = 0.5 * (lo + hi);
  out.q = q_at(out.t);
  // The LDA axis (t = 1/2) and the grid are members of the family as well.
  const double q_lda = quantile_unchecked(delta, s1, s2, a_lda);
  if (q_lda > out.q) {
    out.q = q_lda;
    out.t = 0.5;
  }
  if (qs[best] > out.q) {
    out.q = qs[best];
    out.t = ts[best];
  }
  out.alpha = overlap_from_separation(out.q);
  return out;
}

MonteCarloOverlap monte_carlo_overlap(const Cluster& c1, const Cluster& c2, int n, Rng& rng) {
  if (n < 10'000) throw ValidationError({"monte_carlo_overlap needs n >= 10000 (got " + std::to_string(n) + ")"});
  const Eigen::MatrixXd s1 = covariance_of(c1);
  const Eigen::MatrixXd s2 = covariance_of(c2);
  const Eigen::VectorXd a = lda_axis(c1.center, c2.center, s1, s2);

  const Eigen::MatrixXd x1 = sample_cluster_points(c1, n, rng);
  const Eigen::MatrixXd x2 = sample_cluster_points(c2, n, rng);
  std::vector<double> p1(static_cast<std::size_t>(n));
  std::vector<double> p2(static_cast<std::size_t>(n));
  Eigen::Map<Eigen::VectorXd>(p1.data(), n) = x1 * a;
  Eigen::Map<Eigen::VectorXd>(p2.data(), n) = x2 * a;
  std::sort(p1.begin(), p1.end());
  std::sort(p2.begin(), p2.end());

  // Cluster 1 lies on the low side of the axis. For a threshold c the error
  // rates are #(p1 > c) / n and #(p2 <= c) / n; minimize their maximum over
  // thresholds at every sample value.
  std::vector<double> thresholds;
  thresholds.reserve(p1.size() + p2.size() + 1);
  thresholds.insert(thresholds.end(), p1.begin(), p1.end());
  thresholds.insert(thresholds.end(), p2.begin(), p2.end());
  std::sort(thresholds.begin(), thresholds.end());

  const double inv_n = 1.0 / n;
  double best = 1.0;
  std::size_t i1 = 0;  // number of p1 <= c
  std::size_t i2 = 0;  // number of p2 <= c
  for (double c : thresholds) {
    while (i1 < p1.size() && p1[i1] <= c) ++i1;
    while (i2 < p2.size() && p2[i2] <= c) ++i2;
    const double e1 = static_cast<double>(p1.size() - i1) * inv_n;
    const double e2 = static_cast<double>(i2) * inv_n;
    best = std::min(best, std::max(e1, e2));
  }
  // Threshold below every sample: e1 = 1, e2 = 0.
  MonteCarloOverlap out;
  out.estimate = 2.0 * best;
  out.std_error = std::sqrt(2.0 * best * (1.0 - best) * inv_n);
  return out;
}

std::vector<OverlapReport> overlap_report(const MixtureModel& model, bool with_exact) {
  std::vector<Eigen::MatrixXd> cov;
  cov.reserve(model.size());
  for (const auto& c : model.clusters) cov.push_back(covariance_of(c));

  std::vector<OverlapReport> out;
  for (std::size_t i = 0; i < model.size(); ++i) {
    for (std::size_t j = i + 1; j < model.size(); ++j) {
      const auto& mi = model.clusters[i].center;
      const auto& mj = model.clusters[j].center;
      OverlapReport r;
      r.i = i;
      r.j = j;
      const Eigen::VectorXd a = lda_axis(mi, mj, cov[i], cov[j]);
      r.q_lda = quantile_unchecked(mj - mi, cov[i], cov[j], a);
      r.alpha_lda = overlap_from_separation(r.q_lda);
      r.alpha_c2c = c2c_overlap(mi, mj, cov[i], cov[j]);
      if (with_exact) r.alpha_exact = exact_overlap_oracle(mi, mj, cov[i], cov[j]);
      out.push_back(r);
    }
  }
  return out;
}

OverlapSummary summarize(const std::vector<OverlapReport>& report, std::size_t n_clusters) {
  OverlapSummary s;
  s.max_neighbor.assign(n_clusters, 0.0);
  for (const auto& r : report) {
    s.max_pairwise = std::max(s.max_pairwise, r.alpha_lda);
    s.max_neighbor[r.i] = std::max(s.max_neighbor[r.i], r.alpha_lda);
    s.max_neighbor[r.j] = std::max(s.max_neighbor[r.j], r.alpha_lda);
  }
  return s;
}

void write_overlap_csv(std::ostream& out, const std::vector<OverlapReport>& report) {
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "i,j,q_lda,alpha_lda,alpha_c2c,alpha_exact\n";
  for (const auto& r : report) {
    out << r.i << ',' << r.j << ',' << num(r.q_lda) << ',' << num(r.alpha_lda) << ','
        << num(r.alpha_c2c) << ',';
    if (r.alpha_exact) out << num(*r.alpha_exact);
    out << '\n';
  }
}

}  // namespace clustergen
