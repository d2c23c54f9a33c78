#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "semshift/embedding.hpp"

namespace semshift {

struct AlignConfig {
    double learning_rate = 0.01;
    int max_iterations = 50000;
    double convergence_tol = 1e-9; // relative loss decrease threshold
    std::uint64_t seed = 0;
};

/// A trained linear transformation between two spaces, with its training trace.
struct LinearMap {
    std::string source_id, target_id;
    Eigen::MatrixXd W; // target_dim x source_dim
    int anchors_used = 0;
    double final_loss = 0.0;
    int iterations_run = 0;
    std::vector<double> loss_trace; // checkpoint every 100 iterations plus the final one
};

// Learns W minimizing the mean squared residual over the anchors by
// full-batch gradient descent. Anchors absent from either vocabulary are
// dropped (reported via `warnings` when given); fewer than 2 usable anchors
// is an error. If the loss increases on a step the learning rate is halved
// and the step retried, so the recorded trace is non-increasing.
LinearMap train_map(const EmbeddingSpace& src, const EmbeddingSpace& dst,
                    const std::vector<std::string>& anchors, const AlignConfig& cfg,
                    std::vector<std::string>* warnings = nullptr);

// Mean of |W v_src - v_dst|^2 over the anchors.
double map_loss(const LinearMap& map, const EmbeddingSpace& src, const EmbeddingSpace& dst,
                const std::vector<std::string>& anchors);

Eigen::VectorXd apply_map(const LinearMap& map, const Eigen::VectorXd& v);

// cos(W01 v0_w, v1_w): how close the mapped word lands to itself in the
// target space.
double one_way_similarity(const LinearMap& map01, const EmbeddingSpace& s0,
                          const EmbeddingSpace& s1, const std::string& word);

// Average of the two round-trip cosines cos(W10 W01 v0, v0) and
// cos(W01 W10 v1, v1).
double round_trip_stability(const LinearMap& map01, const LinearMap& map10,
                            const EmbeddingSpace& s0, const EmbeddingSpace& s1,
                            const std::string& word);

// Max relative error between the analytic gradient of the mean anchor loss
// at W and a central finite difference, entry-wise.
double gradient_check(const EmbeddingSpace& src, const EmbeddingSpace& dst,
                      const std::vector<std::string>& anchors, const Eigen::MatrixXd& W,
                      double epsilon);

// "semshift-map v1 <src_dim> <dst_dim>" header, then dst_dim rows of src_dim values.
void save_map(const LinearMap& map, const std::filesystem::path& path);
LinearMap load_map(const std::filesystem::path& path, std::string source_id = "",
                   std::string target_id = "");

// One word per line, '#' starts a comment.
std::vector<std::string> load_anchor_file(const std::filesystem::path& path);

} // namespace semshift
