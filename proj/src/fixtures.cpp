#include "semshift/fixtures.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "semshift/errors.hpp"

namespace semshift {

namespace {

double uniform_unit(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

double gaussian(std::mt19937_64& rng) {
    double u1 = uniform_unit(rng);
    double u2 = uniform_unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Eigen::VectorXd random_unit(std::mt19937_64& rng, int dim) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = gaussian(rng);
    return v / v.norm();
}

} // namespace

Eigen::MatrixXd random_orthogonal(int dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd g(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) g(r, c) = gaussian(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < dim; ++c)
        if (r(c, c) < 0) q.col(c) = -q.col(c);
    return q;
}

EmbeddingSpace transform_space(const EmbeddingSpace& base, const Eigen::MatrixXd& m, std::string id) {
    if (m.cols() != base.dim) throw input_error("transform_space: matrix/space dimension mismatch");
    Eigen::MatrixXd out = base.vectors * m.transpose();
    return make_space(std::move(id), base.words, std::move(out));
}

EmbeddingSpace perturb_words(const EmbeddingSpace& base, const std::vector<std::string>& targets,
                             std::uint64_t seed, std::string id) {
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd out = base.vectors;
    for (const auto& w : targets) {
        int row = base.index_of(w);
        out.row(row) = random_unit(rng, base.dim).transpose();
    }
    return make_space(std::move(id), base.words, std::move(out));
}

std::vector<std::string> sample_words(const EmbeddingSpace& space, int k, std::uint64_t seed) {
    if (k < 0 || k > space.size()) throw input_error("sample_words: k out of range");
    std::vector<int> idx(space.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    // Fisher-Yates prefix; std::shuffle's draw pattern is not pinned by the standard.
    for (int i = 0; i < k; ++i) {
        int j = i + static_cast<int>(rng() % static_cast<std::uint64_t>(idx.size() - i));
        std::swap(idx[i], idx[j]);
    }
    std::vector<std::string> out(k);
    for (int i = 0; i < k; ++i) out[i] = space.words[idx[i]];
    std::sort(out.begin(), out.end());
    return out;
}

EmbeddingSpace generate_clustered_space(int n, int dim, int clusters, double spread_min,
                                        double spread_max, std::uint64_t seed, std::string id) {
    if (n < 2 || dim < 2) throw input_error("clustered space needs n >= 2 and dim >= 2");
    if (clusters < 1 || clusters > n) throw input_error("cluster count out of range");
    if (spread_min <= 0 || spread_max < spread_min) throw input_error("bad spread range");
    if (id.empty()) id = "clusters" + std::to_string(seed);

    std::mt19937_64 rng(seed);
    std::vector<Eigen::VectorXd> centers(clusters);
    std::vector<double> spread(clusters);
    for (int c = 0; c < clusters; ++c) {
        centers[c] = random_unit(rng, dim);
        double t = clusters == 1 ? 0.0 : static_cast<double>(c) / (clusters - 1);
        spread[c] = spread_min + t * (spread_max - spread_min);
    }

    Eigen::MatrixXd m(n, dim);
    for (int r = 0; r < n; ++r) {
        int c = r % clusters;
        Eigen::VectorXd v = centers[c];
        for (int d = 0; d < dim; ++d) v[d] += spread[c] * gaussian(rng);
        m.row(r) = (v / v.norm()).transpose();
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
