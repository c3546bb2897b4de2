#include "clustergen/archetype.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "clustergen/errors.hpp"

namespace clustergen {

namespace {

template <typename T>
std::string violation(std::string_view field, std::string_view bound, const T& got) {
  std::ostringstream os;
  os << field << " must be " << bound << " (got " << got << ")";
  return os.str();
}

double triangular(double lo, double mode, double hi, Rng& rng) {
  if (!(hi > lo)) return mode;
  const double bounds[] = {lo, mode, hi};
  const double weights[] = {0.0, 1.0, 0.0};
  std::piecewise_linear_distribution<double> dist(std::begin(bounds), std::end(bounds),
                                                  std::begin(weights));
  return std::clamp(dist(rng), lo, hi);
}

// Values in pair order: v0, partner(v0), v1, partner(v1), ..., [ref].
std::vector<double> maxmin_pairs(const MaxMinSpec& spec, Rng& rng) {
  const double ref = spec.ref_value;
  const double m = spec.maxmin_ratio;
  std::vector<double> out;
  out.reserve(spec.count);
  const std::size_t n_pairs = spec.count / 2;
  for (std::size_t p = 0; p < n_pairs; ++p) {
    if (spec.constraint_kind == ConstraintKind::kGeometricMean) {
      const double half_span = 0.5 * std::log(m);
      const double u = triangular(-half_span, 0.0, half_span, rng);
      out.push_back(ref * std::exp(u));
      out.push_back(ref * std::exp(-u));
    } else {
      // std::isinf(m) happens for volume ratios in high dimensions.
      const double lo = std::isinf(m) ? 0.0 : 2.0 * ref / (1.0 + m);
      const double hi = std::isinf(m) ? 2.0 * ref : 2.0 * ref * m / (1.0 + m);
      const double s = triangular(lo, ref, hi, rng);
      out.push_back(s);
      out.push_back(2.0 * ref - s);
    }
  }
  if (spec.count % 2 == 1) out.push_back(ref);
  return out;
}

void check_spec(const MaxMinSpec& spec) {
  std::vector<std::string> v;
  if (!(spec.ref_value > 0.0) || !std::isfinite(spec.ref_value))
    v.push_back(violation("ref_value", "positive and finite", spec.ref_value));
  if (!(spec.maxmin_ratio >= 1.0)) v.push_back(violation("maxmin_ratio", ">= 1", spec.maxmin_ratio));
  if (spec.count < 1) v.push_back(violation("count", ">= 1", spec.count));
  if (!v.empty()) throw ValidationError(std::move(v));
}

// Largest-remainder apportionment of `total` according to `weights`
// (nonnegative, summing to ~1). Ties go to the lower index.
std::vector<int> apportion(const std::vector<double>& weights, int total) {
  const std::size_t m = weights.size();
  std::vector<int> counts(m);
  std::vector<double> frac(m);
  int assigned = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double exact = weights[i] * total;
    counts[i] = static_cast<int>(std::floor(exact));
    frac[i] = exact - counts[i];
    assigned += counts[i];
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t r = 0; assigned < total; ++r, ++assigned) ++counts[order[r % m]];
  return counts;
}

}  // namespace

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  const auto head = static_cast<unsigned char>(s.front());
  if (!(std::isalpha(head) || head == '_')) return false;
  return std::all_of(s.begin() + 1, s.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u == '_';
  });
}

std::vector<std::string> validate_archetype(const Archetype& a) {
  std::vector<std::string> v;
  if (!is_identifier(a.name))
    v.push_back("name must be a valid identifier: letter or underscore first, then letters, "
                "digits or underscores (got \"" + a.name + "\")");
  if (a.n_clusters < 1) v.push_back(violation("n_clusters", ">= 1", a.n_clusters));
  if (a.dim < 2) v.push_back(violation("dim", ">= 2", a.dim));
  if (a.n_samples < 1) v.push_back(violation("n_samples", ">= 1", a.n_samples));
  if (!(a.aspect_ref >= 1.0)) v.push_back(violation("aspect_ref", ">= 1", a.aspect_ref));
  if (!(a.aspect_maxmin >= 1.0)) v.push_back(violation("aspect_maxmin", ">= 1", a.aspect_maxmin));
  if (!(a.radius_maxmin >= 1.0)) v.push_back(violation("radius_maxmin", ">= 1", a.radius_maxmin));
  if (!(a.scale > 0.0) || !std::isfinite(a.scale))
    v.push_back(violation("scale", "positive and finite", a.scale));
  if (!(a.max_overlap > 0.0 && a.max_overlap < 1.0))
    v.push_back(violation("max_overlap", "in (0, 1)", a.max_overlap));
  if (!(a.min_overlap > 0.0 && a.min_overlap < 1.0))
    v.push_back(violation("min_overlap", "in (0, 1)", a.min_overlap));
  if (!(a.min_overlap < a.max_overlap)) {
    std::ostringstream os;
    os << "min_overlap must be < max_overlap (got " << a.min_overlap << " >= " << a.max_overlap
       << ")";
    v.push_back(os.str());
  }
  if (!(a.imbalance_ratio >= 1.0))
    v.push_back(violation("imbalance_ratio", ">= 1", a.imbalance_ratio));
  if (a.distributions.empty()) v.push_back("distributions must be a nonempty list");
  for (const auto& d : a.distributions) {
    if (auto problem = check_params(d)) v.push_back("distributions: " + *problem);
  }
  if (a.distribution_proportions) {
    const auto& p = *a.distribution_proportions;
    if (p.size() != a.distributions.size()) {
      std::ostringstream os;
      os << "distribution_proportions must have one entry per distribution (got " << p.size()
         << " for " << a.distributions.size() << ")";
      v.push_back(os.str());
    }
    double sum = 0.0;
    bool nonneg = true;
    for (double x : p) {
      sum += x;
      nonneg = nonneg && x >= 0.0 && std::isfinite(x);
    }
    if (!nonneg) v.push_back("distribution_proportions must be nonnegative");
    if (std::abs(sum - 1.0) > 1e-9) v.push_back(violation("distribution_proportions", "summing to 1", sum));
  }
  return v;
}

void require_valid(const Archetype& a) {
  if (auto v = validate_archetype(a); !v.empty()) throw ValidationError(std::move(v));
}

std::vector<double> maxmin_sample(const MaxMinSpec& spec, Rng& rng) {
  check_spec(spec);
  auto out = maxmin_pairs(spec, rng);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

std::vector<int> sample_group_sizes(const Archetype& a, Rng& rng) {
  if (a.n_clusters < 1 || a.n_samples < a.n_clusters) {
    throw ValidationError({violation("n_samples", ">= n_clusters (" + std::to_string(a.n_clusters) + ")",
                                     a.n_samples)});
  }
  const int k = a.n_clusters;
  const MaxMinSpec spec{static_cast<double>(a.n_samples) / k, a.imbalance_ratio, ConstraintKind::kSum,
                        static_cast<std::size_t>(k)};
  const auto real_sizes = maxmin_sample(spec, rng);

  std::vector<double> weights(real_sizes.size());
  for (std::size_t j = 0; j < real_sizes.size(); ++j) weights[j] = real_sizes[j] / a.n_samples;
  auto sizes = apportion(weights, a.n_samples);

  // Rounding can only empty a cluster when the imbalance ratio is extreme.
  for (auto& s : sizes) {
    if (s == 0) {
      ++s;
      --*std::max_element(sizes.begin(), sizes.end());
    }
  }
  return sizes;
}

std::vector<double> sample_aspect_ratios(const Archetype& a, Rng& rng) {
  const MaxMinSpec spec{a.aspect_ref, a.aspect_maxmin, ConstraintKind::kGeometricMean,
                        static_cast<std::size_t>(a.n_clusters)};
  check_spec(spec);
  auto values = maxmin_pairs(spec, rng);
  const double ref_sq = a.aspect_ref * a.aspect_ref;
  for (std::size_t p = 0; p + 1 < values.size(); p += 2) {
    for (std::size_t side = 0; side < 2; ++side) {
      if (values[p + side] < 1.0) {
        values[p + side] = 1.0;
        values[p + 1 - side] = ref_sq;
      }
    }
  }
  std::shuffle(values.begin(), values.end(), rng);
  return values;
}

std::vector<double> sample_cluster_radii(const Archetype& a, Rng& rng) {
  // Work with volumes relative to scale^dim so nothing overflows.
  const double dim = a.dim;
  const double log_ratio = dim * std::log(a.radius_maxmin);
  const MaxMinSpec spec{1.0, std::exp(log_ratio), ConstraintKind::kSum,
                        static_cast<std::size_t>(a.n_clusters)};
  check_spec(spec);
  auto rel_volumes = maxmin_pairs(spec, rng);

  // Smallest admissible radius: scale * (2 / (1 + M^dim))^(1/dim).
  const double softplus = log_ratio + std::log1p(std::exp(-log_ratio));
  const double r_floor = a.scale * std::exp((std::log(2.0) - softplus) / dim);

  std::vector<double> radii(rel_volumes.size());
  for (std::size_t j = 0; j < radii.size(); ++j) {
    radii[j] = std::max(a.scale * std::pow(rel_volumes[j], 1.0 / dim), r_floor);
  }
  std::shuffle(radii.begin(), radii.end(), rng);
  return radii;
}

std::vector<double> sample_axis_lengths(double aspect, double radius, int dim, Rng& rng) {
  std::vector<std::string> v;
  if (!(aspect >= 1.0)) v.push_back(violation("aspect", ">= 1", aspect));
  if (!(radius > 0.0)) v.push_back(violation("radius", "> 0", radius));
  if (dim < 1) v.push_back(violation("dim", ">= 1", dim));
  if (!v.empty()) throw ValidationError(std::move(v));

  if (dim == 1) return {radius};
  const double root = std::sqrt(aspect);
  std::vector<double> lengths = {radius * root, radius / root};
  if (dim > 2) {
    const MaxMinSpec inner{radius, aspect, ConstraintKind::kGeometricMean,
                           static_cast<std::size_t>(dim - 2)};
    const auto rest = maxmin_pairs(inner, rng);
    lengths.insert(lengths.end(), rest.begin(), rest.end());
  }
  std::sort(lengths.begin(), lengths.end(), std::greater<>());
  return lengths;
}

std::vector<DistributionSpec> assign_distributions(const Archetype& a, Rng& rng) {
  const std::size_t m = a.distributions.size();
  if (m == 0) throw ValidationError({"distributions must be a nonempty list"});
  std::vector<double> weights = a.distribution_proportions.value_or(std::vector<double>(m, 1.0 / m));
  const auto counts = apportion(weights, a.n_clusters);

  std::vector<DistributionSpec> out;
  out.reserve(a.n_clusters);
  for (std::size_t i = 0; i < m; ++i) out.insert(out.end(), counts[i], a.distributions[i]);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

std::vector<Archetype> sample_hyperparams(const Archetype& a, int n_variants,
                                          const HyperparamBounds& bounds, Rng& rng,
                                          int max_attempts) {
  struct Range {
    std::string_view field;
    int center;
    int lo;
    int hi;
  };
  auto make_range = [](std::string_view field, int center, std::optional<int> lo,
                       std::optional<int> hi, int floor) {
    return Range{field, center, std::max(lo.value_or(floor), floor),
                 hi.value_or(std::numeric_limits<int>::max())};
  };
  const Range clusters =
      make_range("n_clusters", a.n_clusters, bounds.min_clusters, bounds.max_clusters, 1);
  const Range dims = make_range("dim", a.dim, bounds.min_dim, bounds.max_dim, 2);
  const Range samples = make_range("n_samples", a.n_samples, bounds.min_samples, bounds.max_samples, 1);

  std::vector<std::string> v;
  for (const Range& r : {clusters, dims, samples}) {
    if (r.lo > r.hi || r.center < r.lo || r.center > r.hi) {
      std::ostringstream os;
      os << r.field << " bounds [" << r.lo << ", " << r.hi << "] must contain the center "
         << r.center;
      v.push_back(os.str());
    }
  }
  if (n_variants < 0) v.push_back(violation("n_variants", ">= 0", n_variants));
  if (!v.empty()) throw ValidationError(std::move(v));

  auto draw = [&](const Range& r, int extra_floor) {
    const int lo = std::max(r.lo, extra_floor);
    if (lo == r.hi) return lo;
    std::poisson_distribution<int> poisson(static_cast<double>(r.center));
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
      const int x = poisson(rng);
      if (x >= lo && x <= r.hi) return x;
    }
    throw Error("sample_hyperparams: no admissible " + std::string(r.field) + " after " +
                std::to_string(max_attempts) + " attempts");
  };

  std::vector<Archetype> out;
  out.reserve(n_variants);
  for (int i = 0; i < n_variants; ++i) {
    Archetype variant = a;
    variant.n_clusters = draw(clusters, 1);
    variant.dim = draw(dims, 2);
    variant.n_samples = draw(samples, variant.n_clusters);
    out.push_back(std::move(variant));
  }
  return out;
}

}  // namespace clustergen
