#include "semshift/align.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "semshift/errors.hpp"
#include "semshift/io_util.hpp"

namespace semshift {

namespace {

// Anchor vectors as columns: src_dim x n and dst_dim x n.
struct AnchorMatrices {
    Eigen::MatrixXd src, dst;
};

AnchorMatrices gather_anchors(const EmbeddingSpace& src, const EmbeddingSpace& dst,
                              const std::vector<std::string>& anchors) {
    AnchorMatrices a;
    a.src.resize(src.dim, static_cast<Eigen::Index>(anchors.size()));
    a.dst.resize(dst.dim, static_cast<Eigen::Index>(anchors.size()));
    for (size_t i = 0; i < anchors.size(); ++i) {
        a.src.col(static_cast<Eigen::Index>(i)) = src.vectors.row(src.index_of(anchors[i]));
        a.dst.col(static_cast<Eigen::Index>(i)) = dst.vectors.row(dst.index_of(anchors[i]));
    }
    return a;
}

double mean_residual_loss(const Eigen::MatrixXd& W, const AnchorMatrices& a) {
    return (W * a.src - a.dst).squaredNorm() / static_cast<double>(a.src.cols());
}

void check_map_spaces(const LinearMap& map, const EmbeddingSpace& src, const EmbeddingSpace& dst) {
    if (!map.source_id.empty() && map.source_id != src.id)
        throw input_error("map was trained from space '" + map.source_id + "', got '" + src.id + "'");
    if (!map.target_id.empty() && map.target_id != dst.id)
        throw input_error("map was trained onto space '" + map.target_id + "', got '" + dst.id + "'");
    if (map.W.cols() != src.dim || map.W.rows() != dst.dim)
        throw input_error("map dimensions do not match the given spaces");
}

} // namespace

LinearMap train_map(const EmbeddingSpace& src, const EmbeddingSpace& dst,
                    const std::vector<std::string>& anchors, const AlignConfig& cfg,
                    std::vector<std::string>* warnings) {
    if (cfg.learning_rate <= 0) throw input_error("learning_rate must be positive");
    if (cfg.max_iterations < 1) throw input_error("max_iterations must be >= 1");

    // Deduplicate and sort so the trained map does not depend on anchor file
    // order; the loss is a mean over the anchor set.
    std::set<std::string> usable;
    int dropped = 0;
    for (const auto& w : anchors) {
        if (src.contains(w) && dst.contains(w)) {
            usable.insert(w);
        } else {
            ++dropped;
            if (warnings)
                warnings->push_back("anchor '" + w + "' absent from a vocabulary, dropped");
        }
    }
    std::vector<std::string> kept(usable.begin(), usable.end());
    if (kept.size() < 2) throw input_error("fewer than 2 usable anchors");
    if (static_cast<int>(kept.size()) < src.dim && warnings)
        warnings->push_back("only " + std::to_string(kept.size()) + " anchors for dimension " +
                            std::to_string(src.dim) + "; the map is underdetermined");

    AnchorMatrices a = gather_anchors(src, dst, kept);
    const double n = static_cast<double>(kept.size());

    LinearMap map;
    map.source_id = src.id;
    map.target_id = dst.id;
    map.anchors_used = static_cast<int>(kept.size());
    map.W = (src.dim == dst.dim) ? Eigen::MatrixXd::Identity(dst.dim, src.dim)
                                 : Eigen::MatrixXd::Zero(dst.dim, src.dim);

    Eigen::MatrixXd residual = map.W * a.src - a.dst;
    double loss = residual.squaredNorm() / n;
    double lr = cfg.learning_rate;
    map.loss_trace.push_back(loss);

    int iter = 0;
    for (; iter < cfg.max_iterations; ++iter) {
        if (!std::isfinite(loss))
            throw input_error("training diverged (non-finite loss) at iteration " +
                              std::to_string(iter));
        if (loss == 0.0) break;

        Eigen::MatrixXd grad = (2.0 / n) * residual * a.src.transpose();
        Eigen::MatrixXd next_w;
        Eigen::MatrixXd next_residual;
        double next_loss = 0.0;
        for (int retry = 0;; ++retry) {
            next_w = map.W - lr * grad;
            next_residual = next_w * a.src - a.dst;
            next_loss = next_residual.squaredNorm() / n;
            if (next_loss <= loss || retry >= 100) break;
            lr *= 0.5;
        }

        map.W = std::move(next_w);
        residual = std::move(next_residual);
        double prev = loss;
        loss = next_loss;
        if ((iter + 1) % 100 == 0) map.loss_trace.push_back(loss);

        if (prev > 0.0 && (prev - loss) / prev < cfg.convergence_tol) {
            ++iter;
            break;
        }
    }

    map.iterations_run = iter;
    map.final_loss = loss;
    if (map.loss_trace.empty() || map.loss_trace.back() != loss) map.loss_trace.push_back(loss);
    return map;
}

double map_loss(const LinearMap& map, const EmbeddingSpace& src, const EmbeddingSpace& dst,
                const std::vector<std::string>& anchors) {
    if (anchors.empty()) throw input_error("map_loss: no anchors given");
    if (map.W.cols() != src.dim || map.W.rows() != dst.dim)
        throw input_error("map dimensions do not match the given spaces");
    double total = 0.0;
    for (const auto& w : anchors) {
        Eigen::VectorXd vs = src.vectors.row(src.index_of(w));
        Eigen::VectorXd vd = dst.vectors.row(dst.index_of(w));
        total += (map.W * vs - vd).squaredNorm();
    }
    return total / static_cast<double>(anchors.size());
}

Eigen::VectorXd apply_map(const LinearMap& map, const Eigen::VectorXd& v) {
    if (v.size() != map.W.cols())
        throw input_error("apply_map: vector has " + std::to_string(v.size()) +
                          " entries, map expects " + std::to_string(map.W.cols()));
    return map.W * v;
}

double one_way_similarity(const LinearMap& map01, const EmbeddingSpace& s0,
                          const EmbeddingSpace& s1, const std::string& word) {
    check_map_spaces(map01, s0, s1);
    Eigen::VectorXd v0 = s0.vectors.row(s0.index_of(word));
    Eigen::VectorXd v1 = s1.vectors.row(s1.index_of(word));
    return cosine_vectors(map01.W * v0, v1);
}

double round_trip_stability(const LinearMap& map01, const LinearMap& map10,
                            const EmbeddingSpace& s0, const EmbeddingSpace& s1,
                            const std::string& word) {
    check_map_spaces(map01, s0, s1);
    check_map_spaces(map10, s1, s0);
    if (map01.W.rows() != map10.W.cols() || map01.W.cols() != map10.W.rows())
        throw input_error("round_trip_stability: map dimension mismatch");
    Eigen::VectorXd v0 = s0.vectors.row(s0.index_of(word));
    Eigen::VectorXd v1 = s1.vectors.row(s1.index_of(word));
    double sim01 = cosine_vectors(map10.W * (map01.W * v0), v0);
    double sim10 = cosine_vectors(map01.W * (map10.W * v1), v1);
    return 0.5 * (sim01 + sim10);
}

double gradient_check(const EmbeddingSpace& src, const EmbeddingSpace& dst,
                      const std::vector<std::string>& anchors, const Eigen::MatrixXd& W,
                      double epsilon) {
    if (epsilon <= 0 || epsilon > 1e-2) throw input_error("epsilon must be in (0, 1e-2]");
    AnchorMatrices a = gather_anchors(src, dst, anchors);
    const double n = static_cast<double>(anchors.size());

    Eigen::MatrixXd analytic = (2.0 / n) * (W * a.src - a.dst) * a.src.transpose();

    double max_rel = 0.0;
    Eigen::MatrixXd probe = W;
    for (Eigen::Index r = 0; r < W.rows(); ++r) {
        for (Eigen::Index c = 0; c < W.cols(); ++c) {
            double orig = probe(r, c);
            probe(r, c) = orig + epsilon;
            double plus = mean_residual_loss(probe, a);
            probe(r, c) = orig - epsilon;
            double minus = mean_residual_loss(probe, a);
            probe(r, c) = orig;
            double fd = (plus - minus) / (2.0 * epsilon);
            double denom = std::max({std::abs(analytic(r, c)), std::abs(fd), 1e-6});
            max_rel = std::max(max_rel, std::abs(analytic(r, c) - fd) / denom);
        }
    }
    return max_rel;
}

void save_map(const LinearMap& map, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << "semshift-map v1 " << map.W.cols() << ' ' << map.W.rows() << '\n';
    for (Eigen::Index r = 0; r < map.W.rows(); ++r) {
        for (Eigen::Index c = 0; c < map.W.cols(); ++c) {
            if (c) out << ' ';
            out << format_double(map.W(r, c));
        }
        out << '\n';
    }
    if (!out) throw input_error("write failed: " + path.string());
}

LinearMap load_map(const std::filesystem::path& path, std::string source_id,
                   std::string target_id) {
    auto in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw input_error(path.string() + ": empty map file");
    auto fields = split_whitespace(line);
    if (fields.size() != 4 || fields[0] != "semshift-map" || fields[1] != "v1")
        throw input_error(path.string() + ": expected header \"semshift-map v1 <src_dim> <dst_dim>\"");
    int src_dim = 0, dst_dim = 0;
    auto r0 = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), src_dim);
    auto r1 = std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), dst_dim);
    if (r0.ec != std::errc{} || r1.ec != std::errc{} || src_dim < 1 || dst_dim < 1)
        throw input_error(path.string() + ": bad dimensions in map header");

    LinearMap map;
    map.source_id = std::move(source_id);
    map.target_id = std::move(target_id);
    map.W.resize(dst_dim, src_dim);
    for (int r = 0; r < dst_dim; ++r) {
        if (!std::getline(in, line))
            throw input_error(path.string() + ": truncated map, expected " + std::to_string(dst_dim) +
                              " rows");
        auto row = split_whitespace(line);
        if (static_cast<int>(row.size()) != src_dim)
            throw input_error(path.string() + ":" + std::to_string(r + 2) + ": expected " +
                              std::to_string(src_dim) + " values");
        for (int c = 0; c < src_dim; ++c) {
            auto v = parse_double(row[c]);
            if (!v || !std::isfinite(*v))
                throw input_error(path.string() + ":" + std::to_string(r + 2) + ": bad value '" +
                                  std::string(row[c]) + "'");
            map.W(r, c) = *v;
        }
    }
    return map;
}

std::vector<std::string> load_anchor_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::vector<std::string> anchors;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto word = trim(line);
        if (!word.empty()) anchors.emplace_back(word);
    }
    return anchors;
}

} // namespace semshift
