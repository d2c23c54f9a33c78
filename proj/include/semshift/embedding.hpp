#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace semshift {

/// One viewpoint's embedding space: a vocabulary and one dense row vector
/// per word. Immutable after construction; validated on load.
struct EmbeddingSpace {
    std::string id;
    std::vector<std::string> words;              // row order
    std::unordered_map<std::string, int> vocab;  // word -> row index
    Eigen::MatrixXd vectors;                     // n_words x dim
    int dim = 0;

    int size() const { return static_cast<int>(words.size()); }

    bool contains(const std::string& word) const { return vocab.count(word) != 0; }

    // Row index of `word`; throws input_error if absent.
    int index_of(const std::string& word) const;

    Eigen::VectorXd vector_of(const std::string& word) const { return vectors.row(index_of(word)); }
};

enum class EmbeddingFormat {
    Word2VecText,    // first line "<n> <dim>", then one word + dim values per line
    HeaderlessText,  // rows only; dim inferred from the first row
};

// Builds a validated space from parts. Rejects duplicate words, non-finite
// entries, zero-norm rows, and vocab/matrix size mismatches.
EmbeddingSpace make_space(std::string id, std::vector<std::string> words, Eigen::MatrixXd vectors);

EmbeddingSpace load_embeddings(const std::filesystem::path& path, EmbeddingFormat format,
                               std::string id = "");

void save_embeddings(const EmbeddingSpace& space, const std::filesystem::path& path,
                     EmbeddingFormat format);

/// The sorted intersection of two spaces' vocabularies, with row lookups
/// into both. All stability computations are defined over this set.
struct SharedVocab {
    std::string id0, id1;            // the two space ids, in call order
    std::vector<std::string> words;  // sorted lexicographically
    std::vector<int> index0, index1; // row indexes, parallel to `words`

    int size() const { return static_cast<int>(words.size()); }
};

SharedVocab intersect_vocab(const EmbeddingSpace& s0, const EmbeddingSpace& s1);

// Cosine similarity of two words' vectors within one space, clamped to [-1, 1].
double cosine(const EmbeddingSpace& space, const std::string& a, const std::string& b);

// Cosine of two raw vectors (throws on zero norm or size mismatch).
double cosine_vectors(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Per-word ranked nearest-neighbor lists over a shared vocabulary.
/// Neighbor lists never contain the word itself, are sorted by descending
/// similarity with ties broken by ascending word, and are clamped to
/// min(m, |shared| - 1) entries.
struct NeighborIndex {
    std::string space_id;
    int m = 0;
    std::vector<std::string> words;             // shared vocab, sorted (list order)
    std::unordered_map<std::string, int> pos;   // word -> position in `words`
    struct Neighbor {
        int pos;      // position of the neighbor in `words`
        double sim;   // cosine similarity in this index's own space
    };
    std::vector<std::vector<Neighbor>> entries; // parallel to `words`

    const std::vector<Neighbor>& of(const std::string& word) const;
    const std::vector<Neighbor>& of(int word_pos) const { return entries.at(word_pos); }
    bool contains(const std::string& word) const { return pos.count(word) != 0; }
};

// Exact exhaustive kNN for one space over the shared vocabulary. The space
// must be one of the two the SharedVocab was built from.
NeighborIndex build_neighbor_index(const EmbeddingSpace& space, const SharedVocab& shared, int m);

// Deterministic pseudo-random unit vectors; words named w0000, w0001, ...
// The same (n, dim, seed) always produces a bit-identical space.
EmbeddingSpace generate_synthetic_space(int n, int dim, std::uint64_t seed, std::string id = "");

} // namespace semshift
