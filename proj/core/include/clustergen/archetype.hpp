#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "clustergen/distribution.hpp"
#include "clustergen/random.hpp"

namespace clustergen {

/// High-level geometric description of a family of clustered data sets.
///
/// Every field has the meaning of the identically named JSON key. Values
/// are not checked on construction; call validate_archetype() or
/// require_valid() before sampling.
struct Archetype {
  std::string name = "archetype";
  int n_clusters = 6;
  int dim = 2;
  int n_samples = 600;
  double aspect_ref = 1.5;
  double aspect_maxmin = 2.0;
  double radius_maxmin = 3.0;
  double scale = 1.0;  ///< reference cluster radius
  double max_overlap = 0.05;
  double min_overlap = 1e-3;
  double imbalance_ratio = 2.0;
  std::vector<DistributionSpec> distributions = {
      DistributionSpec::with_defaults(Family::kNormal),
      DistributionSpec::with_defaults(Family::kExponential)};
  std::optional<std::vector<double>> distribution_proportions;
  std::optional<std::uint64_t> seed;

  friend bool operator==(const Archetype&, const Archetype&) = default;
};

/// First character letter or underscore, the rest alphanumeric or underscore.
bool is_identifier(std::string_view s);

/// One message per violated invariant, naming the field and the bound.
/// Empty iff the archetype is valid.
std::vector<std::string> validate_archetype(const Archetype& a);

/// Throws ValidationError when validate_archetype() reports anything.
void require_valid(const Archetype& a);

// ---------------------------------------------------------------------------
// Max-min sampling

enum class ConstraintKind { kGeometricMean, kSum };

/// Reference value plus max-min ratio for `count` values. With
/// kGeometricMean the values multiply to ref^count, with kSum they add up
/// to count * ref. In both cases max/min <= maxmin_ratio.
struct MaxMinSpec {
  double ref_value = 1.0;
  double maxmin_ratio = 1.0;
  ConstraintKind constraint_kind = ConstraintKind::kGeometricMean;
  std::size_t count = 1;
};

/// Values are drawn in conjugate pairs. The first member of a pair comes
/// from a triangular distribution with its mode at the reference value (log
/// scale for kGeometricMean); the partner restores the constraint. An odd
/// count adds one value equal to the reference. Output order is shuffled.
std::vector<double> maxmin_sample(const MaxMinSpec& spec, Rng& rng);

/// Integer group sizes that sum to n_samples, imbalance bounded by
/// imbalance_ratio (up to one count of rounding slack).
std::vector<int> sample_group_sizes(const Archetype& a, Rng& rng);

/// Per-cluster aspect ratios >= 1 with geometric mean aspect_ref.
std::vector<double> sample_aspect_ratios(const Archetype& a, Rng& rng);

/// Per-cluster radii whose volumes (radius^dim) average to scale^dim.
std::vector<double> sample_cluster_radii(const Archetype& a, Rng& rng);

/// `dim` principal axis lengths, sorted descending, with geometric mean
/// `radius` and longest/shortest equal to `aspect`.
std::vector<double> sample_axis_lengths(double aspect, double radius, int dim, Rng& rng);

/// Distribution for each cluster. Counts per distribution follow the
/// largest-remainder rounding of proportion * n_clusters (uniform split when
/// no proportions are given); only the order depends on `rng`.
std::vector<DistributionSpec> assign_distributions(const Archetype& a, Rng& rng);

/// Inclusive bounds for hyperparameter resampling. Unset bounds are open.
struct HyperparamBounds {
  std::optional<int> min_clusters, max_clusters;
  std::optional<int> min_dim, max_dim;
  std::optional<int> min_samples, max_samples;
};

/// Variants of `a` with n_clusters, dim and n_samples redrawn from Poisson
/// distributions centered on the original values, rejecting draws outside
/// the bounds. Throws ValidationError on infeasible bounds and Error when a
/// draw is still rejected after `max_attempts` tries.
std::vector<Archetype> sample_hyperparams(const Archetype& a, int n_variants,
                                          const HyperparamBounds& bounds, Rng& rng,
                                          int max_attempts = 10'000);

// ---------------------------------------------------------------------------
// JSON

/// Canonical JSON form (sorted keys). distribution entries with default
/// parameters serialize as plain names, others as {"name": ..., <param>: ...}.
nlohmann::json archetype_to_json(const Archetype& a);

/// Parses an archetype object. Unknown keys throw ValidationError; missing
/// keys are taken from `defaults` (n_samples defaults to 100 * n_clusters)
/// and, if `applied_defaults` is given, their names are appended to it.
/// The result is not validated.
Archetype archetype_from_json(const nlohmann::json& j, const Archetype& defaults = {},
                              std::vector<std::string>* applied_defaults = nullptr);

/// Reads one archetype per non-blank line. Errors name the 1-based line.
std::vector<Archetype> read_archetypes_jsonl(std::istream& in);

std::string archetype_to_jsonl(const std::vector<Archetype>& archetypes);

}  // namespace clustergen
