#pragma once
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "aword/codebook.hpp"
#include "aword/error.hpp"
#include "aword/types.hpp"

namespace aword {

// One frame feature mapped to a word: a discrete id plus the weight vector
// the embedding layer will use for that id. Id 0 is reserved for padding and
// always embeds to the zero vector, so real ids start at 1.
struct Assignment {
    int word_id = 0;
    Vec weight;
};

struct SaConfig {
    int k = 5;
    double beta = 1.0;
};

// Issues the fresh sequential ids used by soft and direct assignment, and
// records each id's weight vector for embedding-table construction. Single
// writer; parallel encoders must partition id ranges or serialize here.
class WordRegistry {
public:
    int register_weight(Vec weight) {
        weights_.push_back(std::move(weight));
        return static_cast<int>(weights_.size());  // ids are 1-based, 0 = pad
    }

    int count() const { return static_cast<int>(weights_.size()); }

    const Vec& weight(int word_id) const {
        if (word_id < 1 || word_id > count())
            throw UnknownWordId("registry has no id " + std::to_string(word_id));
        return weights_[static_cast<std::size_t>(word_id - 1)];
    }

    const std::vector<Vec>& weights() const { return weights_; }

private:
    std::vector<Vec> weights_;
};

// Nearest codeword, weight = that centroid. Ids are 1 + centroid index.
inline Assignment hard_assign(const Vec& x, const Codebook& cb) {
    const auto [idx, d2] = nearest_codeword(cb, x);
    (void)d2;
    return {static_cast<int>(idx) + 1, cb.centroids.row(idx).transpose()};
}

// Introspection output of soft_assign: the selected neighbors and their
// normalized inverse-distance weights (sum exactly 1 over the k-NN).
struct SoftAssignDetail {
    std::vector<Index> neighbors;
    Vec weights;
};

// Weighted centroid of the k nearest codewords with weights
// exp(-beta d^2) normalized over the neighborhood. Every soft word is unique,
// so the id comes fresh from the registry. k = 1 reduces exactly to hard
// assignment (single weight is exp(0)/exp(0) = 1).
inline Assignment soft_assign(const Vec& x, const Codebook& cb, const SaConfig& cfg,
                              WordRegistry& registry, SoftAssignDetail* detail = nullptr) {
    if (x.size() != cb.dim())
        throw DimMismatch("soft_assign: dim " + std::to_string(x.size()) + " != codebook dim " +
                          std::to_string(cb.dim()));
    if (cfg.k < 1 || cfg.k > cb.k())
        throw KTooLarge("soft_assign k = " + std::to_string(cfg.k) + ", codebook has " +
                        std::to_string(cb.k()) + " words");

    std::vector<std::pair<double, Index>> dist(static_cast<std::size_t>(cb.k()));
    for (Index i = 0; i < cb.k(); ++i)
        dist[static_cast<std::size_t>(i)] = {(cb.centroids.row(i).transpose() - x).squaredNorm(), i};
    std::partial_sort(dist.begin(), dist.begin() + cfg.k, dist.end());

    // Shift by the nearest distance before exponentiating; the normalization
    // cancels the shift but the arithmetic stays in range.
    const double d2_min = dist[0].first;
    Vec w(cfg.k);
    for (int j = 0; j < cfg.k; ++j) w[j] = std::exp(-cfg.beta * (dist[static_cast<std::size_t>(j)].first - d2_min));
    w /= w.sum();

    Vec omega = Vec::Zero(cb.dim());
    for (int j = 0; j < cfg.k; ++j)
        omega += w[j] * cb.centroids.row(dist[static_cast<std::size_t>(j)].second).transpose();

    if (detail) {
        detail->neighbors.clear();
        for (int j = 0; j < cfg.k; ++j) detail->neighbors.push_back(dist[static_cast<std::size_t>(j)].second);
        detail->weights = w;
    }
    const int id = registry.register_weight(omega);
    return {id, std::move(omega)};
}

// The feature itself is the word; no codebook involved.
inline Assignment direct_assign(const Vec& x, WordRegistry& registry) {
    if (!x.allFinite()) throw NonFiniteInput("direct_assign: feature has non-finite values");
    Vec omega = x;
    const int id = registry.register_weight(omega);
    return {id, std::move(omega)};
}

// Default soft-assignment kernel scale: 1 / (2 m) with m the mean squared
// distance from the training features to their nearest centroid.
inline double default_beta(const Mat& samples, const Codebook& cb) {
    if (samples.rows() == 0) throw InsufficientData("default_beta: no samples");
    double m = 0.0;
    for (Index i = 0; i < samples.rows(); ++i)
        m += nearest_codeword(cb, samples.row(i).transpose()).second;
    m /= static_cast<double>(samples.rows());
    if (m <= 0.0) return 1.0;  // degenerate: every sample sits on a centroid
    return 1.0 / (2.0 * m);
}

} // namespace aword
