#include "semshift/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "semshift/errors.hpp"
#include "semshift/io_util.hpp"

namespace semshift {

int EmbeddingSpace::index_of(const std::string& word) const {
    auto it = vocab.find(word);
    if (it == vocab.end()) throw input_error("unknown word in space '" + id + "': " + word);
    return it->second;
}

namespace {

void validate_rows(const std::string& id, const Eigen::MatrixXd& vectors) {
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
        double sq = 0.0;
        for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
            double v = vectors(r, c);
            if (!std::isfinite(v))
                throw input_error("space '" + id + "': non-finite value in row " + std::to_string(r));
            sq += v * v;
        }
        if (sq == 0.0)
            throw input_error("space '" + id + "': zero vector in row " + std::to_string(r));
    }
}

} // namespace

EmbeddingSpace make_space(std::string id, std::vector<std::string> words, Eigen::MatrixXd vectors) {
    if (static_cast<Eigen::Index>(words.size()) != vectors.rows())
        throw input_error("space '" + id + "': word count does not match matrix rows");
    if (vectors.cols() < 1) throw input_error("space '" + id + "': dimension must be positive");
    EmbeddingSpace s;
    s.id = std::move(id);
    s.dim = static_cast<int>(vectors.cols());
    s.words = std::move(words);
    s.vocab.reserve(s.words.size());
    for (size_t i = 0; i < s.words.size(); ++i) {
        auto [it, inserted] = s.vocab.emplace(s.words[i], static_cast<int>(i));
        if (!inserted) throw input_error("space '" + s.id + "': duplicate word: " + s.words[i]);
    }
    validate_rows(s.id, vectors);
    s.vectors = std::move(vectors);
    return s;
}

EmbeddingSpace load_embeddings(const std::filesystem::path& path, EmbeddingFormat format,
                               std::string id) {
    auto in = open_input(path);
    if (id.empty()) id = path.stem().string();

    auto fail = [&](long line_no, const std::string& what) -> input_error {
        return input_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
    };

    std::string line;
    long line_no = 0;
    long expected_n = -1;
    int dim = -1;

    if (format == EmbeddingFormat::Word2VecText) {
        if (!std::getline(in, line)) throw fail(1, "malformed header: empty file");
        ++line_no;
        auto fields = split_whitespace(line);
        if (fields.size() != 2) throw fail(1, "malformed header: expected \"<n> <dim>\"");
        long n = 0;
        int d = 0;
        auto r0 = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), n);
        auto r1 = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), d);
        bool ok0 = r0.ec == std::errc{} && r0.ptr == fields[0].data() + fields[0].size();
        bool ok1 = r1.ec == std::errc{} && r1.ptr == fields[1].data() + fields[1].size();
        if (!ok0 || !ok1 || n < 1 || d < 1) throw fail(1, "malformed header: expected \"<n> <dim>\"");
        expected_n = n;
        dim = d;
    }

    std::vector<std::string> words;
    std::vector<double> values;
    std::unordered_map<std::string, long> seen; // word -> first line

    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_whitespace(line);
        if (fields.empty()) continue; // blank line
        if (dim < 0) {
            dim = static_cast<int>(fields.size()) - 1;
            if (dim < 1) throw fail(line_no, "row has no vector entries");
        }
        if (static_cast<int>(fields.size()) != dim + 1)
            throw fail(line_no, "row has " + std::to_string(fields.size() - 1) + " values, expected " +
                                    std::to_string(dim));
        std::string word(fields[0]);
        auto [it, inserted] = seen.emplace(word, line_no);
        if (!inserted)
            throw fail(line_no, "duplicate word '" + word + "' (first seen on line " +
                                    std::to_string(it->second) + ")");
        double sq = 0.0;
        for (int c = 0; c < dim; ++c) {
            auto v = parse_double(fields[c + 1]);
            if (!v || !std::isfinite(*v))
                throw fail(line_no, "non-finite or unparseable value '" + std::string(fields[c + 1]) + "'");
            values.push_back(*v);
            sq += *v * *v;
        }
        if (sq == 0.0) throw fail(line_no, "zero vector for word '" + word + "'");
        words.push_back(std::move(word));
    }

    if (expected_n >= 0 && static_cast<long>(words.size()) != expected_n)
        throw input_error(path.string() + ": header announces " + std::to_string(expected_n) +
                          " words but file has " + std::to_string(words.size()));
    if (words.empty()) throw input_error(path.string() + ": no embedding rows");

    Eigen::MatrixXd m(static_cast<Eigen::Index>(words.size()), dim);
    for (size_t r = 0; r < words.size(); ++r)
        for (int c = 0; c < dim; ++c) m(static_cast<Eigen::Index>(r), c) = values[r * dim + c];

    return make_space(std::move(id), std::move(words), std::move(m));
}

void save_embeddings(const EmbeddingSpace& space, const std::filesystem::path& path,
                     EmbeddingFormat format) {
    auto out = open_output(path);
    if (format == EmbeddingFormat::Word2VecText)
        out << space.size() << ' ' << space.dim << '\n';
    for (int r = 0; r < space.size(); ++r) {
        out << space.words[r];
        for (int c = 0; c < space.dim; ++c) out << ' ' << format_double(space.vectors(r, c));
        out << '\n';
    }
    if (!out) throw input_error("write failed: " + path.string());
}

SharedVocab intersect_vocab(const EmbeddingSpace& s0, const EmbeddingSpace& s1) {
    SharedVocab sv;
    sv.id0 = s0.id;
    sv.id1 = s1.id;
    for (const auto& w : s0.words)
        if (s1.contains(w)) sv.words.push_back(w);
    std::sort(sv.words.begin(), sv.words.end());
    sv.index0.reserve(sv.words.size());
    sv.index1.reserve(sv.words.size());
    for (const auto& w : sv.words) {
        sv.index0.push_back(s0.vocab.at(w));
        sv.index1.push_back(s1.vocab.at(w));
    }
    return sv;
}

double cosine_vectors(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size()) throw input_error("cosine: dimension mismatch");
    double na = a.norm();
    double nb = b.norm();
    if (na == 0.0 || nb == 0.0) throw input_error("cosine: zero-norm vector");
    double c = a.dot(b) / (na * nb);
    return std::clamp(c, -1.0, 1.0);
}

double cosine(const EmbeddingSpace& space, const std::string& a, const std::string& b) {
    Eigen::VectorXd va = space.vectors.row(space.index_of(a));
    Eigen::VectorXd vb = space.vectors.row(space.index_of(b));
    return cosine_vectors(va, vb);
}

const std::vector<NeighborIndex::Neighbor>& NeighborIndex::of(const std::string& word) const {
    auto it = pos.find(word);
    if (it == pos.end()) throw input_error("word not in neighbor index: " + word);
    return entries[it->second];
}

NeighborIndex build_neighbor_index(const EmbeddingSpace& space, const SharedVocab& shared, int m) {
    if (m < 1) throw input_error("neighbor count m must be >= 1");
    if (shared.size() == 0) throw input_error("shared vocabulary is empty");

    const std::vector<int>* rows = nullptr;
    if (space.id == shared.id0)
        rows = &shared.index0;
    else if (space.id == shared.id1)
        rows = &shared.index1;
    else
        throw input_error("space '" + space.id + "' is not part of this shared vocabulary");

    const int n = shared.size();
    const int keep = std::min(m, n - 1);

    NeighborIndex idx;
    idx.space_id = space.id;
    idx.m = m;
    idx.words = shared.words;
    idx.pos.reserve(shared.words.size());
    for (int i = 0; i < n; ++i) idx.pos.emplace(shared.words[i], i);
    idx.entries.assign(n, {});

    // Precompute norms once; similarities use the same dot/(|a||b|) arithmetic
    // as cosine() so the brute-force oracle reproduces them exactly.
    std::vector<double> norm(n);
    for (int i = 0; i < n; ++i) norm[i] = space.vectors.row((*rows)[i]).norm();

    // Symmetric pair scan over the upper triangle.
    std::vector<std::vector<NeighborIndex::Neighbor>> sims(n);
    for (auto& s : sims) s.reserve(n - 1);
    for (int i = 0; i < n; ++i) {
        const auto vi = space.vectors.row((*rows)[i]);
        for (int j = i + 1; j < n; ++j) {
            double c = vi.dot(space.vectors.row((*rows)[j])) / (norm[i] * norm[j]);
            c = std::clamp(c, -1.0, 1.0);
            sims[i].push_back({j, c});
            sims[j].push_back({i, c});
        }
    }

    auto better = [](const NeighborIndex::Neighbor& a, const NeighborIndex::Neighbor& b) {
        if (a.sim != b.sim) return a.sim > b.sim;
        return a.pos < b.pos; // words are sorted, so position order is lexicographic
    };
    for (int i = 0; i < n; ++i) {
        auto& cand = sims[i];
        if (static_cast<int>(cand.size()) > keep) {
            std::nth_element(cand.begin(), cand.begin() + keep, cand.end(), better);
            cand.resize(keep);
        }
        std::sort(cand.begin(), cand.end(), better);
        idx.entries[i] = std::move(cand);
    }
    return idx;
}

namespace {

// Uniform in (0, 1]; (x >> 11) has 53 random bits.
double uniform_unit(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

} // namespace

EmbeddingSpace generate_synthetic_space(int n, int dim, std::uint64_t seed, std::string id) {
    if (n < 2) throw input_error("synthetic space needs n >= 2");
    if (dim < 2) throw input_error("synthetic space needs dim >= 2");
    if (id.empty()) id = "synth" + std::to_string(seed);

    std::mt19937_64 rng(seed);
    Eigen::MatrixXd m(n, dim);
    // Box-Muller from the raw engine stream: bit-identical across platforms,
    // unlike std::normal_distribution.
    double spare = 0.0;
    bool have_spare = false;
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < dim; ++c) {
            if (have_spare) {
                m(r, c) = spare;
                have_spare = false;
            } else {
                double u1 = uniform_unit(rng);
                double u2 = uniform_unit(rng);
                double mag = std::sqrt(-2.0 * std::log(u1));
                m(r, c) = mag * std::cos(2.0 * M_PI * u2);
                spare = mag * std::sin(2.0 * M_PI * u2);
                have_spare = true;
            }
        }
        m.row(r) /= m.row(r).norm();
    }

    int width = 4;
    for (long limit = 10000; n > limit; limit *= 10) ++width;
    std::vector<std::string> words(n);
    for (int i = 0; i < n; ++i) {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "w%0*d", width, i);
        words[i] = buf;
    }
    return make_space(std::move(id), std::move(words), std::move(m));
}

} // namespace semshift
