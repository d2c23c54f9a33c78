#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "semshift/align.hpp"
#include "semshift/embedding.hpp"

namespace semshift {

enum class StabilityMethod { Linear, Neighbor, Combination };

const char* method_name(StabilityMethod m);
StabilityMethod method_from_name(const std::string& name);

struct StabilityParams {
    int m = 100;                 // neighbor count
    int iterations = 5;          // T
    double sim_floor = 0.4;      // neighbor-based method only
    double prior_epsilon = 1e-6; // clamp for division by prior scores
};

/// Per-word stability scores in [0, 1] over a shared vocabulary.
struct StabilityReport {
    StabilityMethod method = StabilityMethod::Linear;
    int iterations = 0;
    StabilityParams params;
    std::string space0_id, space1_id;
    std::vector<std::string> words; // sorted (shared vocab order)
    std::vector<double> scores;     // parallel to `words`
    std::unordered_map<std::string, int> pos;

    bool contains(const std::string& word) const { return pos.count(word) != 0; }
    double score_of(const std::string& word) const;
    void rebuild_pos();
};

/// Per-iteration snapshots, for oracle comparisons and invariant checks.
struct StabilityTrace {
    std::vector<std::vector<double>> raw;        // before min-max normalization
    std::vector<std::vector<double>> normalized; // after
};

// Round-trip mapping stability per shared word, clamped to [0, 1]. Raw
// round-trip cosines are reported (no min-max rescaling): identical spaces
// must score ~1 for every word, which a min-max pass would destroy.
StabilityReport linear_stability(const EmbeddingSpace& s0, const EmbeddingSpace& s1,
                                 const SharedVocab& shared, const LinearMap& map01,
                                 const LinearMap& map10);

// Iterative neighbor-based stability. Starts from all-stable scores, then
// for T bulk-synchronous rounds averages each word's similarity to its
// other-space neighbor list weighted by the neighbors' previous scores,
// min-max normalizing after every round. Neighbor lists are pre-filtered
// to similarity >= sim_floor in their own space.
StabilityReport neighbor_stability(const EmbeddingSpace& s0, const EmbeddingSpace& s1,
                                   const NeighborIndex& idx0, const NeighborIndex& idx1,
                                   const StabilityParams& params, StabilityTrace* trace = nullptr);

// Rank-weighted count of the overlap between two neighbor lists:
//   |Ni| * |Ni ∩ Nj| - sum over the intersection of rank_j(w') / prior(w')
// with zero-based ranks in Nj and priors clamped below by epsilon.
// Words missing from `priors` count as fully stable (prior 1).
double overlap_count(const std::vector<std::string>& ni, const std::vector<std::string>& nj,
                     const std::unordered_map<std::string, double>& priors, double epsilon);

// 1 if the lists are equal as sets, 0 if both counts are zero, 0.5 otherwise.
double lambda_select(const std::vector<std::string>& n0, const std::vector<std::string>& n1,
                     double c01, double c10);

// Combined stability: rank-based overlap counts on the shared part of the
// neighbor lists, mapped-vector similarity on the rest, mixed by lambda and
// min-max normalized per iteration.
StabilityReport combination_stability(const EmbeddingSpace& s0, const EmbeddingSpace& s1,
                                      const NeighborIndex& idx0, const NeighborIndex& idx1,
                                      const LinearMap& map01, const LinearMap& map10,
                                      const StabilityParams& params,
                                      StabilityTrace* trace = nullptr);

// x -> (x - min) / (max - min); if all values are equal, everything becomes 1.
void minmax_normalize(std::vector<double>& scores);

// Full ordering, most unstable first; ties broken lexicographically.
std::vector<std::string> rank_by_instability(const StabilityReport& report);

// Jaccard similarity of the last-k sets of two rankings.
double tail_jaccard(const std::vector<std::string>& rank_a, const std::vector<std::string>& rank_b,
                    int k);

} // namespace semshift
