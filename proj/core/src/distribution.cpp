#include "clustergen/distribution.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <utility>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/exponential.hpp>
#include <boost/math/distributions/extreme_value.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/distributions/weibull.hpp>

#include "clustergen/errors.hpp"

namespace clustergen {

namespace bm = boost::math;

std::string_view family_name(Family f) {
  switch (f) {
    case Family::kNormal: return "normal";
    case Family::kLognormal: return "lognormal";
    case Family::kExponential: return "exponential";
    case Family::kStandardT: return "standard_t";
    case Family::kGamma: return "gamma";
    case Family::kChisquare: return "chisquare";
    case Family::kWeibull: return "weibull";
    case Family::kGumbel: return "gumbel";
    case Family::kF: return "f";
    case Family::kPareto: return "pareto";
    case Family::kBeta: return "beta";
    case Family::kUniform: return "uniform";
  }
  return "unknown";
}

std::optional<Family> family_from_name(std::string_view name) {
  for (Family f : kAllFamilies) {
    if (family_name(f) == name) return f;
  }
  return std::nullopt;
}

std::vector<std::string_view> family_param_names(Family f) {
  switch (f) {
    case Family::kNormal:
    case Family::kUniform: return {};
    case Family::kLognormal: return {"sigma"};
    case Family::kExponential: return {"rate"};
    case Family::kStandardT:
    case Family::kChisquare: return {"df"};
    case Family::kGamma:
    case Family::kWeibull:
    case Family::kPareto: return {"shape"};
    case Family::kGumbel: return {"scale"};
    case Family::kF: return {"dfnum", "dfden"};
    case Family::kBeta: return {"a", "b"};
  }
  return {};
}

std::vector<double> default_params(Family f) {
  switch (f) {
    case Family::kNormal:
    case Family::kUniform: return {};
    case Family::kLognormal: return {0.75};
    case Family::kExponential: return {1.0};
    case Family::kStandardT: return {5.0};
    case Family::kGamma: return {2.0};
    case Family::kChisquare: return {4.0};
    case Family::kWeibull: return {1.5};
    case Family::kGumbel: return {1.0};
    case Family::kF: return {5.0, 10.0};
    case Family::kPareto: return {3.0};
    case Family::kBeta: return {2.0, 2.0};
  }
  return {};
}

std::optional<std::string> check_params(const DistributionSpec& spec) {
  const auto names = family_param_names(spec.family);
  if (spec.params.size() != names.size()) {
    std::ostringstream os;
    os << family_name(spec.family) << " takes " << names.size() << " parameter(s), got "
       << spec.params.size();
    return os.str();
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double v = spec.params[i];
    if (!std::isfinite(v) || v <= 0.0) {
      std::ostringstream os;
      os << family_name(spec.family) << " parameter " << names[i] << " must be > 0, got " << v;
      return os.str();
    }
  }
  return std::nullopt;
}

double abs_cdf(const DistributionSpec& spec, double q) {
  if (q <= 0.0) return 0.0;
  const auto& p = spec.params;
  switch (spec.family) {
    case Family::kNormal: {
      const bm::normal d(0.0, 1.0);
      return bm::cdf(d, q) - bm::cdf(d, -q);
    }
    case Family::kStandardT: {
      const bm::students_t d(p[0]);
      return bm::cdf(d, q) - bm::cdf(d, -q);
    }
    case Family::kGumbel: {
      const bm::extreme_value d(0.0, p[0]);
      return bm::cdf(d, q) - bm::cdf(d, -q);
    }
    case Family::kLognormal: return bm::cdf(bm::lognormal(0.0, p[0]), q);
    case Family::kExponential: return bm::cdf(bm::exponential(p[0]), q);
    case Family::kGamma: return bm::cdf(bm::gamma_distribution<>(p[0], 1.0), q);
    case Family::kChisquare: return bm::cdf(bm::chi_squared(p[0]), q);
    case Family::kWeibull: return bm::cdf(bm::weibull(p[0], 1.0), q);
    case Family::kF: return bm::cdf(bm::fisher_f(p[0], p[1]), q);
    // Lomax (Pareto II) on [0, inf): F(x) = 1 - (1 + x)^-shape.
    case Family::kPareto: return -std::expm1(-p[0] * std::log1p(q));
    case Family::kBeta: return q >= 1.0 ? 1.0 : bm::cdf(bm::beta_distribution<>(p[0], p[1]), q);
    case Family::kUniform: return q >= 1.0 ? 1.0 : q;
  }
  return 0.0;
}

namespace {

double solve_normalization(const DistributionSpec& spec) {
  double lo = 0.0;
  double hi = 1.0;
  while (abs_cdf(spec, hi) < kRadialCoverage) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw Error("normalization constant bracket diverged");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (abs_cdf(spec, mid) < kRadialCoverage) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double normalization_constant(const DistributionSpec& spec) {
  if (auto problem = check_params(spec)) throw ValidationError({*problem});

  using Key = std::pair<int, std::vector<double>>;
  static std::mutex mutex;
  static std::map<Key, double> cache;

  Key key{static_cast<int>(spec.family), spec.params};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double q = solve_normalization(spec);
  std::lock_guard lock(mutex);
  cache.emplace(std::move(key), q);
  return q;
}

RadialDistribution::RadialDistribution(DistributionSpec spec)
    : spec_(std::move(spec)), norm_constant_(normalization_constant(spec_)) {}

double RadialDistribution::sample_raw(Rng& rng) const {
  const auto& p = spec_.params;
  switch (spec_.family) {
    case Family::kNormal: return std::normal_distribution<double>(0.0, 1.0)(rng);
    case Family::kLognormal: return std::lognormal_distribution<double>(0.0, p[0])(rng);
    case Family::kExponential: return std::exponential_distribution<double>(p[0])(rng);
    case Family::kStandardT: return std::student_t_distribution<double>(p[0])(rng);
    case Family::kGamma: return std::gamma_distribution<double>(p[0], 1.0)(rng);
    case Family::kChisquare: return std::chi_squared_distribution<double>(p[0])(rng);
    case Family::kWeibull: return std::weibull_distribution<double>(p[0], 1.0)(rng);
    case Family::kGumbel: return std::extreme_value_distribution<double>(0.0, p[0])(rng);
    case Family::kF: return std::fisher_f_distribution<double>(p[0], p[1])(rng);
    case Family::kPareto: {
      // Inverse CDF of the Lomax law; 1 - u lies in (0, 1].
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      return std::expm1(-std::log1p(-u) / p[0]);
    }
    case Family::kBeta: {
      const double x = std::gamma_distribution<double>(p[0], 1.0)(rng);
      const double y = std::gamma_distribution<double>(p[1], 1.0)(rng);
      return x / (x + y);
    }
    case Family::kUniform: return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  }
  return 0.0;
}

}  // namespace clustergen
