#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clustergen/random.hpp"

namespace clustergen {

/// Univariate families available for the radial profile of a cluster.
enum class Family {
  kNormal,
  kLognormal,
  kExponential,
  kStandardT,
  kGamma,
  kChisquare,
  kWeibull,
  kGumbel,
  kF,
  kPareto,
  kBeta,
  kUniform,
};

inline constexpr std::array<Family, 12> kAllFamilies = {
    Family::kNormal,    Family::kLognormal, Family::kExponential, Family::kStandardT,
    Family::kGamma,     Family::kChisquare, Family::kWeibull,     Family::kGumbel,
    Family::kF,         Family::kPareto,    Family::kBeta,        Family::kUniform,
};

std::string_view family_name(Family f);
std::optional<Family> family_from_name(std::string_view name);

/// Names of the shape parameters of a family, in storage order.
///   lognormal: sigma         standard_t: df       gamma: shape
///   chisquare: df            weibull: shape       gumbel: scale
///   f: dfnum, dfden          pareto: shape        beta: a, b
///   exponential: rate        normal, uniform: none
std::vector<std::string_view> family_param_names(Family f);
std::vector<double> default_params(Family f);

/// A family together with its shape parameters.
struct DistributionSpec {
  Family family = Family::kNormal;
  std::vector<double> params;

  static DistributionSpec with_defaults(Family f) { return {f, default_params(f)}; }
  std::string_view name() const { return family_name(family); }
  bool has_default_params() const { return params == default_params(family); }

  friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;
};

/// Returns a description of what is wrong with the parameters, or nullopt.
std::optional<std::string> check_params(const DistributionSpec& spec);

/// Coverage probability used for radial normalization: after rescaling, the
/// 68.2% quantile of |X| is one.
inline constexpr double kRadialCoverage = 0.682;

/// P(|X| <= q) for the unnormalized family.
double abs_cdf(const DistributionSpec& spec, double q);

/// q with P(|X| <= q) = 0.682, found by bisection on the family CDF.
/// Results are cached per (family, params). Throws ValidationError on
/// invalid parameters.
double normalization_constant(const DistributionSpec& spec);

/// Sampler for the normalized radial length |X| / q.
class RadialDistribution {
 public:
  explicit RadialDistribution(DistributionSpec spec);

  const DistributionSpec& spec() const noexcept { return spec_; }
  double norm_constant() const noexcept { return norm_constant_; }

  /// Raw draw from the unnormalized family (signed for normal, t, gumbel).
  double sample_raw(Rng& rng) const;

  /// Normalized radial length |X| / q, always >= 0.
  double operator()(Rng& rng) const { return std::abs(sample_raw(rng)) / norm_constant_; }

 private:
  DistributionSpec spec_;
  double norm_constant_;
};

}  // namespace clustergen
