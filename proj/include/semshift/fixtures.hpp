#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "semshift/embedding.hpp"

namespace semshift {

// Deterministic random orthogonal matrix (QR of a Gaussian matrix with the
// sign convention that makes the factorization unique).
Eigen::MatrixXd random_orthogonal(int dim, std::uint64_t seed);

// New space whose vectors are M * v for every word of `base`.
EmbeddingSpace transform_space(const EmbeddingSpace& base, const Eigen::MatrixXd& m, std::string id);

// Copy of `base` where the listed words' vectors are replaced by fresh
// independent random unit directions.
EmbeddingSpace perturb_words(const EmbeddingSpace& base, const std::vector<std::string>& targets,
                             std::uint64_t seed, std::string id);

// Deterministic sample of k distinct words from the space.
std::vector<std::string> sample_words(const EmbeddingSpace& space, int k, std::uint64_t seed);

// Synthetic space with cluster structure: words are drawn around a set of
// random unit centers with per-cluster spread interpolated over
// [spread_min, spread_max]. Gives words heterogeneous neighborhood tightness,
// unlike the fully isotropic generate_synthetic_space().
EmbeddingSpace generate_clustered_space(int n, int dim, int clusters, double spread_min,
                                        double spread_max, std::uint64_t seed, std::string id = "");

} // namespace semshift
