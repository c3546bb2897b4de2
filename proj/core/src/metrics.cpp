#include "clustergen/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

#include "clustergen/errors.hpp"

namespace clustergen {

Labeling Labeling::from(std::span<const int> raw) {
  Labeling l;
  std::unordered_map<int, int> ids;
  l.labels_.reserve(raw.size());
  for (int v : raw) {
    auto [it, inserted] = ids.try_emplace(v, static_cast<int>(ids.size()));
    l.labels_.push_back(it->second);
  }
  l.k_ = static_cast<int>(ids.size());
  return l;
}

std::vector<int> Labeling::class_sizes() const {
  std::vector<int> sizes(static_cast<std::size_t>(k_), 0);
  for (int v : labels_) ++sizes[static_cast<std::size_t>(v)];
  return sizes;
}

namespace {

void require_same_length(const Labeling& a, const Labeling& b) {
  if (a.size() != b.size())
    throw Error("labelings have different lengths (" + std::to_string(a.size()) + " vs " +
                std::to_string(b.size()) + ")");
}

double entropy(const std::vector<int>& sizes, double n) {
  double h = 0.0;
  for (int s : sizes)
    if (s > 0) h -= (s / n) * std::log(s / n);
  return h;
}

double lfact(double x) { return std::lgamma(x + 1.0); }

// Expected mutual information of two labelings with the given marginals
// under the hypergeometric (permutation) model.
double expected_mutual_information(const std::vector<int>& a, const std::vector<int>& b, int n_total) {
  const double n = n_total;
  const double log_n = std::log(n);
  const double base = -lfact(n);
  double emi = 0.0;
  for (int ai : a) {
    for (int bj : b) {
      const int lo = std::max(1, ai + bj - n_total);
      const int hi = std::min(ai, bj);
      const double fixed = base + lfact(ai) + lfact(bj) + lfact(n - ai) + lfact(n - bj);
      for (int nij = lo; nij <= hi; ++nij) {
        const double log_p = fixed - lfact(nij) - lfact(ai - nij) - lfact(bj - nij) -
                             lfact(n - ai - bj + nij);
        const double term = (nij / n) * (log_n + std::log(static_cast<double>(nij)) -
                                         std::log(static_cast<double>(ai)) - std::log(static_cast<double>(bj)));
        emi += term * std::exp(log_p);
      }
    }
  }
  return emi;
}

double sq_dist(const Eigen::MatrixXd& x, Eigen::Index r, const Eigen::MatrixXd& c, Eigen::Index j) {
  return (x.row(r) - c.row(j)).squaredNorm();
}

struct LloydRun {
  std::vector<int> labels;
  Eigen::MatrixXd centroids;
  double wcss = 0.0;
};

Eigen::MatrixXd kmeanspp_seed(const Eigen::MatrixXd& x, int k, Rng& rng) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd c(k, x.cols());
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  Eigen::Index first = pick(rng);
  c.row(0) = x.row(first);
  used[first] = 1;
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index r = 0; r < n; ++r) d2[r] = sq_dist(x, r, c, 0);
  for (int j = 1; j < k; ++j) {
    double total = 0.0;
    for (double v : d2) total += v;
    Eigen::Index chosen = -1;
    if (total > 0.0) {
      std::discrete_distribution<Eigen::Index> dd(d2.begin(), d2.end());
      chosen = dd(rng);
    } else {
      // Every point coincides with a seed; take any unused row.
      for (Eigen::Index r = 0; r < n && chosen < 0; ++r)
        if (!used[r]) chosen = r;
    }
    c.row(j) = x.row(chosen);
    used[chosen] = 1;
    for (Eigen::Index r = 0; r < n; ++r) d2[r] = std::min(d2[r], sq_dist(x, r, c, j));
  }
  return c;
}

LloydRun lloyd(const Eigen::MatrixXd& x, Eigen::MatrixXd c, const KMeansOptions& opt) {
  const Eigen::Index n = x.rows();
  const int k = static_cast<int>(c.rows());
  LloydRun run;
  run.labels.assign(static_cast<std::size_t>(n), 0);
  std::vector<double> dist(static_cast<std::size_t>(n));
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opt.max_iter; ++it) {
    double wcss = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
      int best = 0;
      double bd = sq_dist(x, r, c, 0);
      for (int j = 1; j < k; ++j) {
        const double d = sq_dist(x, r, c, j);
        if (d < bd) {
          bd = d;
          best = j;
        }
      }
      run.labels[r] = best;
      dist[r] = bd;
      wcss += bd;
    }
    run.wcss = wcss;
    if (prev - wcss <= opt.tol * std::max(wcss, std::numeric_limits<double>::min())) break;
    prev = wcss;

    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(k, x.cols());
    std::vector<int> count(static_cast<std::size_t>(k), 0);
    for (Eigen::Index r = 0; r < n; ++r) {
      sum.row(run.labels[r]) += x.row(r);
      ++count[run.labels[r]];
    }
    for (int j = 0; j < k; ++j) {
      if (count[j] > 0) {
        c.row(j) = sum.row(j) / count[j];
      } else {
        // Empty cluster: move it to the point farthest from its centroid.
        const auto far = std::max_element(dist.begin(), dist.end()) - dist.begin();
        c.row(j) = x.row(far);
        dist[far] = 0.0;
      }
    }
  }
  run.centroids = std::move(c);
  return run;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& x, int k, Rng& rng, const KMeansOptions& options) {
  if (k < 1) throw Error("kmeans needs k >= 1");
  if (k > x.rows())
    throw Error("kmeans needs k <= n (got k=" + std::to_string(k) + ", n=" + std::to_string(x.rows()) + ")");
  LloydRun best;
  best.wcss = std::numeric_limits<double>::infinity();
  for (int init = 0; init < std::max(1, options.n_init); ++init) {
    LloydRun run = lloyd(x, kmeanspp_seed(x, k, rng), options);
    if (run.wcss < best.wcss) best = std::move(run);
  }
  KMeansResult out;
  out.labeling = Labeling::from(best.labels);
  out.centroids = std::move(best.centroids);
  out.wcss = best.wcss;
  return out;
}

Eigen::MatrixXi contingency(const Labeling& a, const Labeling& b) {
  require_same_length(a, b);
  Eigen::MatrixXi t = Eigen::MatrixXi::Zero(a.k(), b.k());
  for (std::size_t r = 0; r < a.size(); ++r) ++t(a.labels()[r], b.labels()[r]);
  return t;
}

double ami(const Labeling& a, const Labeling& b) {
  require_same_length(a, b);
  const int n_int = static_cast<int>(a.size());
  if (n_int == 0) throw Error("ami needs nonempty labelings");
  // Both trivial (one class each, or all singletons each): identical partitions.
  if ((a.k() == 1 && b.k() == 1) || (a.k() == n_int && b.k() == n_int)) return 1.0;
  const double n = n_int;
  const Eigen::MatrixXi t = contingency(a, b);
  const auto sa = a.class_sizes();
  const auto sb = b.class_sizes();
  double mi = 0.0;
  for (int i = 0; i < t.rows(); ++i)
    for (int j = 0; j < t.cols(); ++j) {
      const int nij = t(i, j);
      if (nij == 0) continue;
      mi += (nij / n) * std::log(n * nij / (static_cast<double>(sa[i]) * sb[j]));
    }
  const double emi = expected_mutual_information(sa, sb, n_int);
  const double mean_h = 0.5 * (entropy(sa, n) + entropy(sb, n));
  double denom = mean_h - emi;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  denom = denom < 0.0 ? std::min(denom, -kEps) : std::max(denom, kEps);
  return (mi - emi) / denom;
}

double ari(const Labeling& a, const Labeling& b) {
  require_same_length(a, b);
  const Eigen::MatrixXi t = contingency(a, b);
  auto c2 = [](double v) { return v * (v - 1.0) / 2.0; };
  double sum_ij = 0.0;
  for (int i = 0; i < t.rows(); ++i)
    for (int j = 0; j < t.cols(); ++j) sum_ij += c2(t(i, j));
  double sum_a = 0.0;
  double sum_b = 0.0;
  for (int s : a.class_sizes()) sum_a += c2(s);
  for (int s : b.class_sizes()) sum_b += c2(s);
  const double total = c2(static_cast<double>(a.size()));
  if (total == 0.0) return 1.0;
  const double expected = sum_a * sum_b / total;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (sum_ij - expected) / (max_index - expected);
}

double silhouette(const Eigen::MatrixXd& x, const Labeling& labels) {
  if (labels.size() != static_cast<std::size_t>(x.rows())) throw Error("silhouette labels do not match the data");
  if (labels.k() < 2) throw Error("silhouette needs at least two clusters");
  const int k = labels.k();
  const auto sizes = labels.class_sizes();
  const Eigen::Index n = x.rows();
  const auto& l = labels.labels();
  std::vector<double> per(static_cast<std::size_t>(k));
  double total = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    const int own = l[r];
    if (sizes[own] == 1) continue;  // singleton scores 0
    std::fill(per.begin(), per.end(), 0.0);
    for (Eigen::Index s = 0; s < n; ++s) per[l[s]] += (x.row(r) - x.row(s)).norm();
    const double a_in = per[own] / (sizes[own] - 1);
    double b_out = std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j)
      if (j != own) b_out = std::min(b_out, per[j] / sizes[j]);
    const double m = std::max(a_in, b_out);
    if (m > 0.0) total += (b_out - a_in) / m;
  }
  return total / static_cast<double>(n);
}

}  // namespace clustergen
