#pragma once

#include <Eigen/Core>

#include "clustergen/archetype.hpp"
#include "clustergen/model.hpp"
#include "clustergen/placement.hpp"
#include "clustergen/random.hpp"

namespace clustergen {

/// Haar-distributed orthonormal matrix: QR of a Gaussian matrix with the
/// signs of R's diagonal folded into Q.
Eigen::MatrixXd sample_orientation(int dim, Rng& rng);

/// Samples shapes, orientations, distributions and group sizes from the
/// archetype, then places the centers so that every overlap constraint
/// holds. Single-cluster archetypes are centered at the origin. Placement
/// that fails to converge is retried from fresh initializations up to
/// config.max_restarts times before the NonConvergenceError propagates.
MixtureModel sample_mixture_model(const Archetype& a, Rng& rng, const PlacementConfig& config = {});

}  // namespace clustergen
