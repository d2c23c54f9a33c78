#include "semshift/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "semshift/errors.hpp"

namespace semshift {

const char* method_name(StabilityMethod m) {
    switch (m) {
        case StabilityMethod::Linear: return "linear";
        case StabilityMethod::Neighbor: return "neighbor";
        case StabilityMethod::Combination: return "combination";
    }
    throw invariant_error("unreachable method");
}

StabilityMethod method_from_name(const std::string& name) {
    if (name == "linear") return StabilityMethod::Linear;
    if (name == "neighbor") return StabilityMethod::Neighbor;
    if (name == "combination") return StabilityMethod::Combination;
    throw input_error("unknown stability method: " + name);
}

double StabilityReport::score_of(const std::string& word) const {
    auto it = pos.find(word);
    if (it == pos.end()) throw input_error("word not covered by stability report: " + word);
    return scores[it->second];
}

void StabilityReport::rebuild_pos() {
    pos.clear();
    pos.reserve(words.size());
    for (size_t i = 0; i < words.size(); ++i) pos.emplace(words[i], static_cast<int>(i));
}

void minmax_normalize(std::vector<double>& scores) {
    if (scores.empty()) throw input_error("minmax_normalize: empty input");
    auto [mn_it, mx_it] = std::minmax_element(scores.begin(), scores.end());
    double mn = *mn_it, mx = *mx_it;
    if (!(std::isfinite(mn) && std::isfinite(mx)))
        throw input_error("minmax_normalize: non-finite score");
    if (mx == mn) {
        // Uniform scores carry no evidence of instability.
        std::fill(scores.begin(), scores.end(), 1.0);
        return;
    }
    double range = mx - mn;
    for (double& s : scores) s = (s - mn) / range;
}

namespace {

struct OverlapResult {
    double count;
    int intersection;
};

// Shared core of the public overlap_count and the combination algorithm.
template <typename Key, typename PriorFn>
OverlapResult overlap_count_core(const std::vector<Key>& ni, const std::vector<Key>& nj,
                                 PriorFn prior, double epsilon) {
    std::unordered_map<Key, int> rank_j;
    rank_j.reserve(nj.size());
    for (int r = 0; r < static_cast<int>(nj.size()); ++r) rank_j.emplace(nj[r], r);

    double rank_sum = 0.0;
    int intersection = 0;
    for (const Key& k : ni) {
        auto it = rank_j.find(k);
        if (it == rank_j.end()) continue;
        ++intersection;
        rank_sum += static_cast<double>(it->second) / std::max(prior(k), epsilon);
    }
    return {static_cast<double>(ni.size()) * intersection - rank_sum, intersection};
}

void verify_index_pair(const EmbeddingSpace& s0, const EmbeddingSpace& s1,
                       const NeighborIndex& idx0, const NeighborIndex& idx1) {
    if (idx0.space_id != s0.id || idx1.space_id != s1.id)
        throw input_error("neighbor indexes do not belong to the given spaces");
    if (idx0.m != idx1.m) throw input_error("neighbor indexes built with different m");
    if (idx0.words != idx1.words)
        throw input_error("neighbor indexes built over different shared vocabularies");
    if (idx0.words.empty()) throw input_error("shared vocabulary is empty");
}

StabilityReport make_report(StabilityMethod method, const StabilityParams& params,
                            const std::string& id0, const std::string& id1,
                            std::vector<std::string> words, std::vector<double> scores) {
    StabilityReport r;
    r.method = method;
    r.iterations = method == StabilityMethod::Linear ? 0 : params.iterations;
    r.params = params;
    r.space0_id = id0;
    r.space1_id = id1;
    r.words = std::move(words);
    r.scores = std::move(scores);
    r.rebuild_pos();
    return r;
}

// Cosine between two shared words inside one space, same arithmetic as cosine().
struct SpaceView {
    const Eigen::MatrixXd& vectors;
    const std::vector<int>& rows;   // shared pos -> row
    std::vector<double> norms;      // per shared pos

    SpaceView(const EmbeddingSpace& s, const std::vector<int>& shared_rows)
        : vectors(s.vectors), rows(shared_rows) {
        norms.resize(rows.size());
        for (size_t i = 0; i < rows.size(); ++i) norms[i] = vectors.row(rows[i]).norm();
    }

    double cos(int a, int b) const {
        double c = vectors.row(rows[a]).dot(vectors.row(rows[b])) / (norms[a] * norms[b]);
        return std::clamp(c, -1.0, 1.0);
    }
};

std::vector<int> shared_rows_for(const EmbeddingSpace& s, const NeighborIndex& idx) {
    std::vector<int> rows(idx.words.size());
    for (size_t i = 0; i < idx.words.size(); ++i) rows[i] = s.index_of(idx.words[i]);
    return rows;
}

} // namespace

StabilityReport linear_stability(const EmbeddingSpace& s0, const EmbeddingSpace& s1,
                                 const SharedVocab& shared, const LinearMap& map01,
                                 const LinearMap& map10) {
    if (shared.size() == 0) throw input_error("shared vocabulary is empty");
    std::vector<double> scores(shared.words.size());
    for (size_t i = 0; i < shared.words.size(); ++i) {
        double s = round_trip_stability(map01, map10, s0, s1, shared.words[i]);
        scores[i] = std::clamp(s, 0.0, 1.0);
    }
    return make_report(StabilityMethod::Linear, StabilityParams{}, s0.id, s1.id, shared.words,
                       std::move(scores));
}

StabilityReport neighbor_stability(const EmbeddingSpace& s0, const EmbeddingSpace& s1,
                                   const NeighborIndex& idx0, const NeighborIndex& idx1,
                                   const StabilityParams& params, StabilityTrace* trace) {
    verify_index_pair(s0, s1, idx0, idx1);
    if (params.iterations < 1) throw input_error("iterations must be >= 1");
    const int n = static_cast<int>(idx0.words.size());

    SpaceView view0(s0, shared_rows_for(s0, idx0));
    SpaceView view1(s1, shared_rows_for(s1, idx1));

    // Filter each list by similarity in its own space, then cache the
    // cross-space cosines used in every iteration: the 01 term walks w's
    // space-1 neighbors but measures them against w in space 0.
    struct Term {
        std::vector<int> nbr;
        std::vector<double> cos;
    };
    std::vector<Term> term01(n), term10(n);
    for (int w = 0; w < n; ++w) {
        for (const auto& nb : idx1.of(w)) {
            if (nb.sim < params.sim_floor) continue;
            term01[w].nbr.push_back(nb.pos);
            term01[w].cos.push_back(view0.cos(w, nb.pos));
        }
        for (const auto& nb : idx0.of(w)) {
            if (nb.sim < params.sim_floor) continue;
            term10[w].nbr.push_back(nb.pos);
            term10[w].cos.push_back(view1.cos(w, nb.pos));
        }
    }

    std::vector<double> prev(n, 1.0), cur(n);
    for (int t = 0; t < params.iterations; ++t) {
        for (int w = 0; w < n; ++w) {
            double sim01 = 0.0, sim10 = 0.0;
            if (!term01[w].nbr.empty()) {
                for (size_t k = 0; k < term01[w].nbr.size(); ++k)
                    sim01 += term01[w].cos[k] * prev[term01[w].nbr[k]];
                sim01 /= static_cast<double>(term01[w].nbr.size());
            }
            if (!term10[w].nbr.empty()) {
                for (size_t k = 0; k < term10[w].nbr.size(); ++k)
                    sim10 += term10[w].cos[k] * prev[term10[w].nbr[k]];
                sim10 /= static_cast<double>(term10[w].nbr.size());
            }
            cur[w] = 0.5 * (sim01 + sim10);
        }
        if (trace) trace->raw.push_back(cur);
        minmax_normalize(cur);
        if (trace) trace->normalized.push_back(cur);
        prev = cur;
    }

    return make_report(StabilityMethod::Neighbor, params, s0.id, s1.id, idx0.words,
                       std::move(prev));
}

double overlap_count(const std::vector<std::string>& ni, const std::vector<std::string>& nj,
                     const std::unordered_map<std::string, double>& priors, double epsilon) {
    auto prior = [&](const std::string& w) {
        auto it = priors.find(w);
        return it == priors.end() ? 1.0 : it->second;
    };
    return overlap_count_core(ni, nj, prior, epsilon).count;
}

double lambda_select(const std::vector<std::string>& n0, const std::vector<std::string>& n1,
                     double c01, double c10) {
    auto sorted = [](std::vector<std::string> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    if (sorted(n0) == sorted(n1)) return 1.0;
    if (c01 == 0.0 && c10 == 0.0) return 0.0;
    return 0.5;
}

StabilityReport combination_stability(const EmbeddingSpace& s0, const EmbeddingSpace& s1,
                                      const NeighborIndex& idx0, const NeighborIndex& idx1,
                                      const LinearMap& map01, const LinearMap& map10,
                                      const StabilityParams& params, StabilityTrace* trace) {
    verify_index_pair(s0, s1, idx0, idx1);
    if (params.iterations < 1) throw input_error("iterations must be >= 1");
    if (map01.W.cols() != s0.dim || map01.W.rows() != s1.dim || map10.W.cols() != s1.dim ||
        map10.W.rows() != s0.dim)
        throw input_error("map dimensions do not match the given spaces");
    if (!map01.source_id.empty() && (map01.source_id != s0.id || map01.target_id != s1.id))
        throw input_error("map01 was not trained between these spaces");
    if (!map10.source_id.empty() && (map10.source_id != s1.id || map10.target_id != s0.id))
        throw input_error("map10 was not trained between these spaces");

    const int n = static_cast<int>(idx0.words.size());
    std::vector<int> rows0 = shared_rows_for(s0, idx0);
    std::vector<int> rows1 = shared_rows_for(s1, idx1);

    // Mapped images of every shared word, as columns, with norms.
    Eigen::MatrixXd mapped0(s1.dim, n), mapped1(s0.dim, n);
    for (int i = 0; i < n; ++i) {
        mapped0.col(i) = map01.W * s0.vectors.row(rows0[i]).transpose();
        mapped1.col(i) = map10.W * s1.vectors.row(rows1[i]).transpose();
    }
    std::vector<double> mnorm0(n), mnorm1(n), norm0(n), norm1(n);
    for (int i = 0; i < n; ++i) {
        mnorm0[i] = mapped0.col(i).norm();
        mnorm1[i] = mapped1.col(i).norm();
        norm0[i] = s0.vectors.row(rows0[i]).norm();
        norm1[i] = s1.vectors.row(rows1[i]).norm();
    }

    // Fixed per-word structures: position lists and the set differences with
    // their mapped cosines. cos(W01 v0_w', v1_w) compares w''s mapped image
    // against the target word vector in space 1.
    struct DiffTerm {
        std::vector<int> nbr;
        std::vector<double> cos;
    };
    std::vector<std::vector<int>> list0(n), list1(n);
    std::vector<DiffTerm> diff01(n), diff10(n);
    for (int w = 0; w < n; ++w) {
        const auto& e0 = idx0.of(w);
        const auto& e1 = idx1.of(w);
        if (e0.size() != e1.size())
            throw input_error("neighbor lists of unequal length between indexes");
        list0[w].reserve(e0.size());
        list1[w].reserve(e1.size());
        for (const auto& nb : e0) list0[w].push_back(nb.pos);
        for (const auto& nb : e1) list1[w].push_back(nb.pos);

        std::vector<char> in1(n, 0), in0(n, 0);
        for (int p : list1[w]) in1[p] = 1;
        for (int p : list0[w]) in0[p] = 1;
        for (int p : list0[w]) {
            if (in1[p]) continue;
            double c = mapped0.col(p).dot(s1.vectors.row(rows1[w])) / (mnorm0[p] * norm1[w]);
            diff01[w].nbr.push_back(p);
            diff01[w].cos.push_back(std::clamp(c, -1.0, 1.0));
        }
        for (int p : list1[w]) {
            if (in0[p]) continue;
            double c = mapped1.col(p).dot(s0.vectors.row(rows0[w])) / (mnorm1[p] * norm0[w]);
            diff10[w].nbr.push_back(p);
            diff10[w].cos.push_back(std::clamp(c, -1.0, 1.0));
        }
    }

    std::vector<double> prev(n, 1.0), cur(n);
    for (int t = 0; t < params.iterations; ++t) {
        for (int w = 0; w < n; ++w) {
            auto prior = [&](int p) { return prev[p]; };
            OverlapResult o01 = overlap_count_core(list0[w], list1[w], prior, params.prior_epsilon);
            OverlapResult o10 = overlap_count_core(list1[w], list0[w], prior, params.prior_epsilon);

            double sim01 = 0.0, sim10 = 0.0;
            if (!diff01[w].nbr.empty()) {
                for (size_t k = 0; k < diff01[w].nbr.size(); ++k)
                    sim01 += diff01[w].cos[k] * prev[diff01[w].nbr[k]];
                sim01 /= static_cast<double>(diff01[w].nbr.size());
            }
            if (!diff10[w].nbr.empty()) {
                for (size_t k = 0; k < diff10[w].nbr.size(); ++k)
                    sim10 += diff10[w].cos[k] * prev[diff10[w].nbr[k]];
                sim10 /= static_cast<double>(diff10[w].nbr.size());
            }

            // Denominator runs over the actual list length, so identical
            // lists with unit priors normalize to exactly 1.
            const double len = static_cast<double>(list0[w].size());
            double s_nei = len == 0.0 ? 0.0 : (o01.count + o10.count) / (len * (len + 1.0));
            double s_lin = 0.5 * (sim01 + sim10);

            double lambda;
            if (o01.intersection == static_cast<int>(list0[w].size()) &&
                list0[w].size() == list1[w].size())
                lambda = 1.0;
            else if (o01.count == 0.0 && o10.count == 0.0)
                lambda = 0.0;
            else
                lambda = 0.5;

            cur[w] = lambda * s_nei + (1.0 - lambda) * s_lin;
        }
        if (trace) trace->raw.push_back(cur);
        minmax_normalize(cur);
        if (trace) trace->normalized.push_back(cur);
        prev = cur;
    }

    return make_report(StabilityMethod::Combination, params, s0.id, s1.id, idx0.words,
                       std::move(prev));
}

std::vector<std::string> rank_by_instability(const StabilityReport& report) {
    std::vector<int> order(report.words.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (report.scores[a] != report.scores[b]) return report.scores[a] < report.scores[b];
        return report.words[a] < report.words[b];
    });
    std::vector<std::string> out(order.size());
    for (size_t i = 0; i < order.size(); ++i) out[i] = report.words[order[i]];
    return out;
}

double tail_jaccard(const std::vector<std::string>& rank_a, const std::vector<std::string>& rank_b,
                    int k) {
    if (k < 1 || k > static_cast<int>(std::min(rank_a.size(), rank_b.size())))
        throw input_error("tail_jaccard: k out of range");
    std::vector<std::string> tail_a(rank_a.end() - k, rank_a.end());
    std::vector<std::string> tail_b(rank_b.end() - k, rank_b.end());
    std::sort(tail_a.begin(), tail_a.end());
    std::sort(tail_b.begin(), tail_b.end());
    std::vector<std::string> inter;
    std::set_intersection(tail_a.begin(), tail_a.end(), tail_b.begin(), tail_b.end(),
                          std::back_inserter(inter));
    double i = static_cast<double>(inter.size());
    double u = static_cast<double>(2 * k) - i;
    return i / u;
}

} // namespace semshift
