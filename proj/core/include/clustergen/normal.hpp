#pragma once

namespace clustergen {

/// Standard normal CDF.
double normal_cdf(double x);

/// Upper tail 1 - Phi(x), computed without cancellation.
double normal_sf(double x);

/// Inverse of the standard normal CDF for p in (0, 1). Rational initial
/// guess followed by a Newton correction against the erfc-based CDF.
double normal_quantile(double p);

/// Overlap 2(1 - Phi(q)) for a separation quantile q.
double overlap_from_separation(double q);

/// Separation quantile q with 2(1 - Phi(q)) = alpha, for alpha in (0, 2).
double separation_from_overlap(double alpha);

}  // namespace clustergen
