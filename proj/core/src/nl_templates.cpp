#include "clustergen/nl.hpp"

namespace clustergen::nl {

namespace {

constexpr std::string_view kParamsTemplate = R"tmpl(Your task is to turn a verbal description of a data set archetype from Repliclust into a precise JSON that specifies which parameter settings to use to create the desired data set archetype in Repliclust. These are the allowed parameters:

n_clusters: int >= 1, the number of clusters to generate
dim: int >= 2, the dimensionality of the data
n_samples: int >= 1, the number of data samples to generate
aspect_ref: float >= 1, the eccentricity of a typical cluster (how oblong vs spherical it is)
aspect_maxmin: float >= 1, how much the eccentricity varies across clusters in a data set
radius_maxmin: float >= 1, how much cluster radius (and thereby cluster volume) varies across the clusters
max_overlap: float > 0, the maximum allowed overlap between any pair of clusters (0.1-0.2 is significant overlap, 0.01-0.05 is little overlap, 0.001 is very little overlap, and 0.0001 and lower is well-separated)
min_overlap: float > 0, the minimum amount of overlap each cluster should have with some other cluster, preventing a cluster from being too far away from all other clusters
imbalance_ratio: float >= 1, specifies how imbalanced the number of data points per cluster is
distributions: list[str], determines the probability distributions to use for the clusters; the available distributions are 'normal', 'standard_t', 'exponential', 'beta', 'uniform', 'chisquare', 'gumbel', 'weibull', 'gamma', 'pareto', 'f', and 'lognormal'

IMPORTANT NOTES:
Any words like "separated", "far away", "close together", or "overlapping" refer to the overlap between clusters. Far apart means that max_overlap is 1e-4 or less
Always make min_overlap smaller than max_overlap, usually ten times smaller!
ONLY include the Pareto ('pareto') distribution if the user specifically asks for heavy tails!

EXAMPLES:

Description: five oblong clusters in two dimensions
Archetype JSON: {
  "n_clusters": 5,
  "dim": 2,
  "n_samples": 500,
  "aspect_ref": 3,
  "aspect_maxmin": 1.5,
}

Description: three spherical clusters with significant overlap in two dimensions
Archetype JSON: {
  "n_clusters": 3,
  "dim": 2,
  "n_samples": 300,
  "max_overlap": 0.2,
  "min_overlap": 0.1,
  "aspect_ref": 1.0,
  "aspect_maxmin": 1.0
}

Description: eight spherical clusters of different sizes with significant overlap in two dimensions
Archetype JSON: {
  "n_clusters": 8,
  "dim": 2,
  "n_samples": 800,
  "max_overlap": 0.25,
  "min_overlap": 0.1,
  "aspect_ref": 1.0,
  "aspect_maxmin": 1.0,
  "radius_maxmin": 2.0
}

Description: ten clusters which are all highly oblong (and equally so) but of very different sizes, with moderate overlap
Archetype JSON: {
  "n_clusters": 10,
  "n_samples": 1000,
  "aspect_ref": 5,
  "aspect_maxmin": 1.0,
  "max_overlap": 0.10,
  "min_overlap": 0.05,
  "radius_maxmin": 4.0
}

Description: five clusters with significant class imbalance
Archetype JSON: {
  "n_clusters": 5,
  "n_samples": 500,
  "imbalance_ratio": 5,
  "aspect_ref": 1.5,
  "aspect_maxmin": 1.5
}

Description: five clusters with perfect class balance
Archetype JSON: {
  "n_clusters": 5,
  "n_samples": 500,
  "imbalance_ratio": 1.0,
  "aspect_ref": 1.4,
  "aspect_maxmin": 1.6
}

Description: eight clusters of which 70
Archetype JSON: {
  "n_clusters": 8,
  "n_samples": 800,
  "aspect_ref": 1.7,
  "aspect_maxmin": 1.5,
  "distributions": ["exponential", "normal"],
  "distribution_proportions": [0.7, 0.3],
}

Description: eight clusters with 1000 total samples of which half are exponentially distributed and half are normally distributed
Archetype JSON: {
  "n_clusters": 8,
  "n_samples": 1000,
  "aspect_ref": 1.7,
  "aspect_maxmin": 1.5,
  "distributions": ["exponential", "normal"],
  "distribution_proportions": [0.5, 0.5]
}

Description: two clusters of different sizes in 10 dimensions that are well-separated
Archetype JSON: {
  "n_clusters": 2,
  "dim": 10,
  "n_samples": 200,
  "aspect_ref": 2
  "aspect_maxmin": 2,
  "radius_maxmin": 4.0,
  "max_overlap": 0.001,
  "min_overlap": 0.0001
}

Description: very oblong clusters that overlap heavily
Archetype JSON: {
  "n_clusters": 6,
  "n_samples": 600,
  "aspect_ref": 7,
  "aspect_maxmin": 1.4,
  "max_overlap": 0.4,
  "min_overlap": 0.3
}

Description: highly separated and very oblong clusters
Archetype JSON: {
  "n_clusters": 4,
  "n_samples": 400,
  "aspect_ref": 6,
  "aspect_maxmin": 1.6,
  "max_overlap": 1e-4,
  "min_overlap": 1e-5
}

Description: ten clusters with very different shapes
Archetype JSON: {
  "n_clusters": 10,
  "n_samples": 1000,
  "aspect_ref": 1.5,
  "aspect_maxmin": 3.0,
  "radius_maxmin": 3.0
}

Description: twelve well-separated clusters with very different shapes
Archetype JSON: {
  "n_clusters": 12,
  "n_samples": 1200,
  "aspect_ref": 1.5,
  "aspect_maxmin": 5.0,
 "radius_maxmin": 5.0, 
 "max_overlap": 1e-4,
  "min_overlap": 1e-5
}}

Description: twelve highly separated Gaussian clusters with very different shapes
Archetype JSON: {
  "n_clusters": 12,
  "n_samples": 1200,
  "aspect_ref": 1.5,
  "aspect_maxmin": 5.0,
 "radius_maxmin": 5.0, 
 "max_overlap": 1e-4,
  "min_overlap": 1e-5
 "distributions": ["normal"]}}

Description: five heavy-tailed clusters
Archetype JSON: {
  "n_clusters": 5,
  "n_samples": 500,
  "aspect_ref": 1.5,
 "distributions": ["standard_t", "lognormal", "pareto"]}}

Description: clusters with holes
Archetype JSON: {"distributions": ["f"]}

Description: clusters from a variety of distributions
Archetype JSON: {"distributions": ["normal", "exponential", "gamma", "weibull", "lognormal"]}

Description: clusters from all different distributions
Archetype JSON: {"distributions": ['normal', 'standard_t', 'exponential', 'beta', 'uniform', 'chisquare', 'gumbel', 'weibull', 'gamma', 'f', and 'lognormal']}

Description: clusters from different distributions
Archetype JSON: {"distributions": ['normal', 'exponential', 'beta', 'uniform', 'chisquare', 'gumbel', 'weibull', 'gamma', 'f', and 'lognormal']}

Description: highly separated clusters from all different distributions but no heavy tails
Archetype JSON: {"max_overlap": 1e-4,
  "min_overlap": 1e-5,
 "distributions": ['normal', 'exponential', 'beta', 'uniform', 'chisquare', 'gumbel', 'weibull', 'gamma', 'f', and 'lognormal']}

Description: seven clusters with uniform distribution with light overlap
Archetype JSON: { "max_overlap": 0.025, 
"min_overlap": 0.0025,
 "distributions": ["uniform"]}

Description: clusters with bounded support
Archetype JSON: {"distributions": ["beta", "uniform"]}

Description: {description}
Archetype JSON:)tmpl";

constexpr std::string_view kIdentifierTemplate = R"tmpl(Your task is to turn a description of a data set archetype into an identifier for
the archetype. The identifier should be short yet descriptive, and not contain any whitespace
(but underscores are OK). IMPORTANT: the identifier should be a valid Python variable name.
Specifically, it may NOT start with a number, nor contain any special character except for
underscores.

EXAMPLES:

Description: five oblong clusters in two dimensions
Archetype identifier: five_oblong_2d

Description: three spherical clusters with significant overlap in two dimensions
Archetype identifier: three_spherical_significant_overlap_2d

Description: eight spherical clusters of different sizes with significant overlap in two dimensions
Archetype identifier: eight_spherical_different_sizes_significant_overlap_2d

Description: ten clusters which are all highly oblong (and equally so) but of very different sizes, with moderate overlap
Archetype identifier: ten_highly_oblong_very_different_shapes_moderate_overlap

Description: five clusters with significant class imbalance
Archetype identifier: five_significant_class_imbalance

Description: five clusters with perfect class balance
Archetype identifier: five_perfect_class_balance

Description: eight clusters of which 70
Archetype identifier: eight_exp_and_norm

Description: eight clusters with 1000 total samples of which half are exponentially distributed and half are normally distributed
Archetype identifier: eight_exp_and_norm_1000_samples

Description: two clusters of different sizes in 10 dimensions that are well-separated
Archetype identifier: two_different_sizes_well_separated_10d

Description: very oblong clusters that overlap heavily
Archetype identifier: very_oblong_heavy_overlap

Description: ten clusters with very different shapes
Archetype identifier: ten_very_different_shapes

Description: {description}
Archetype identifier:)tmpl";

}  // namespace

std::string_view prompt_template(PromptKind kind) {
  return kind == PromptKind::kParams ? kParamsTemplate : kIdentifierTemplate;
}

}  // namespace clustergen::nl
