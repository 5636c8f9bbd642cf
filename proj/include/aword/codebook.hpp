#pragma once
#include <cassert>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "aword/error.hpp"
#include "aword/parallel.hpp"
#include "aword/rng.hpp"
#include "aword/types.hpp"

namespace aword {

// K cluster centroids over the training features; every frame feature maps to
// a codeword through its nearest centroid. Immutable once fitted.
struct Codebook {
    Mat centroids;  // K x D, one centroid per row
    std::uint64_t seed = 0;
    double distortion = 0.0;  // mean squared assignment distance at fit end

    Index k() const { return centroids.rows(); }
    Index dim() const { return centroids.cols(); }
};

// Index of the closest centroid (L2) plus the squared distance. Ties resolve
// to the lowest index.
inline std::pair<Index, double> nearest_codeword(const Codebook& cb, const Vec& x) {
    if (x.size() != cb.dim())
        throw DimMismatch("nearest_codeword: dim " + std::to_string(x.size()) + " != codebook dim " +
                          std::to_string(cb.dim()));
    Index best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < cb.k(); ++i) {
        const double d2 = (cb.centroids.row(i).transpose() - x).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    return {best, best_d2};
}

struct KmeansOptions {
    int max_iter = 100;
    double rel_tol = 1e-6;
    int threads = 1;
    std::vector<double>* history = nullptr;  // receives per-iteration distortion
};

namespace detail {

// Per-chunk partial results for one assignment pass. Merged in chunk order so
// the reduction is bit-identical for any thread count.
struct AssignPartial {
    Mat sums;                  // K x D
    std::vector<Index> counts; // K
    double sse = 0.0;
};

inline void assign_pass(const Mat& samples, const Mat& centroids, int threads,
                        std::vector<Index>& owner, std::vector<double>& owner_d2,
                        Mat& sums, std::vector<Index>& counts, double& sse) {
    const std::size_t n = static_cast<std::size_t>(samples.rows());
    const Index k = centroids.rows();
    const Index d = centroids.cols();
    const std::size_t chunk = 1024;
    std::vector<AssignPartial> partials(chunk_count(n, chunk));

    parallel_chunks(threads, n, chunk, [&](const ChunkRange& range) {
        AssignPartial& p = partials[range.index];
        p.sums = Mat::Zero(k, d);
        p.counts.assign(static_cast<std::size_t>(k), 0);
        for (std::size_t i = range.begin; i < range.end; ++i) {
            const auto x = samples.row(static_cast<Index>(i));
            Index best = 0;
            double best_d2 = std::numeric_limits<double>::infinity();
            for (Index c = 0; c < k; ++c) {
                const double d2 = (centroids.row(c) - x).squaredNorm();
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = c;
                }
            }
            owner[i] = best;
            owner_d2[i] = best_d2;
            p.sums.row(best) += x;
            ++p.counts[static_cast<std::size_t>(best)];
            p.sse += best_d2;
        }
    });

    sums = Mat::Zero(k, d);
    counts.assign(static_cast<std::size_t>(k), 0);
    sse = 0.0;
    for (const auto& p : partials) {
        sums += p.sums;
        for (Index c = 0; c < k; ++c) counts[static_cast<std::size_t>(c)] += p.counts[static_cast<std::size_t>(c)];
        sse += p.sse;
    }
}

// k-means++ seeding: first centroid uniform, the rest proportional to the
// squared distance from the nearest chosen centroid.
inline Mat seed_centroids(const Mat& samples, Index k, std::mt19937_64& rng) {
    const Index n = samples.rows();
    Mat centroids(k, samples.cols());
    const Index first = static_cast<Index>(uniform_below(rng, static_cast<std::uint64_t>(n)));
    centroids.row(0) = samples.row(first);

    Vec d2 = (samples.rowwise() - centroids.row(0)).rowwise().squaredNorm();
    for (Index c = 1; c < k; ++c) {
        const double total = d2.sum();
        Index pick = 0;
        if (total > 0.0) {
            const double r = uniform_real(rng) * total;
            double cum = 0.0;
            pick = n - 1;
            for (Index i = 0; i < n; ++i) {
                cum += d2[i];
                if (cum > r) {
                    pick = i;
                    break;
                }
            }
        } else {
            // All remaining mass on already-chosen points; fall back to uniform.
            pick = static_cast<Index>(uniform_below(rng, static_cast<std::uint64_t>(n)));
        }
        centroids.row(c) = samples.row(pick);
        d2 = d2.cwiseMin((samples.rowwise() - centroids.row(c)).rowwise().squaredNorm());
    }
    return centroids;
}

} // namespace detail

// Lloyd iterations with k-means++ seeding. Deterministic for a fixed seed and
// input order; per-iteration distortion is asserted non-increasing. Empty
// clusters are reseeded to the point currently farthest from its assigned
// centroid (lowest point index on ties).
inline Codebook kmeans_fit(const Mat& samples, Index k, std::uint64_t seed,
                           const KmeansOptions& opts = {}) {
    const Index n = samples.rows();
    if (k < 1) throw BadConfig("kmeans k must be >= 1");
    if (n < k)
        throw TooFewSamples("kmeans needs >= " + std::to_string(k) + " samples, got " + std::to_string(n));

    std::mt19937_64 rng(derive_seed(seed, "kmeans"));
    Mat centroids = detail::seed_centroids(samples, k, rng);

    std::vector<Index> owner(static_cast<std::size_t>(n));
    std::vector<double> owner_d2(static_cast<std::size_t>(n));
    Mat sums;
    std::vector<Index> counts;
    double prev_distortion = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        double sse = 0.0;
        detail::assign_pass(samples, centroids, opts.threads, owner, owner_d2, sums, counts, sse);
        const double distortion = sse / static_cast<double>(n);
        assert(distortion <= prev_distortion * (1.0 + 1e-12) + 1e-12);
        if (opts.history) opts.history->push_back(distortion);

        for (Index c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0)
                centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        }
        // Reseed empties after the regular update, in ascending centroid order.
        for (Index c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] != 0) continue;
            Index farthest = 0;
            double far_d2 = -1.0;
            for (Index i = 0; i < n; ++i) {
                if (owner_d2[static_cast<std::size_t>(i)] > far_d2) {
                    far_d2 = owner_d2[static_cast<std::size_t>(i)];
                    farthest = i;
                }
            }
            centroids.row(c) = samples.row(farthest);
            owner_d2[static_cast<std::size_t>(farthest)] = 0.0; // keep later empties distinct
        }

        const bool converged =
            prev_distortion < std::numeric_limits<double>::infinity() &&
            prev_distortion - distortion < opts.rel_tol * std::max(prev_distortion, 1e-300);
        prev_distortion = distortion;
        if (converged) break;
    }

    // Final distortion belongs to the final centroids.
    double sse = 0.0;
    detail::assign_pass(samples, centroids, opts.threads, owner, owner_d2, sums, counts, sse);

    Codebook cb;
    cb.centroids = std::move(centroids);
    cb.seed = seed;
    cb.distortion = sse / static_cast<double>(n);
    return cb;
}

} // namespace aword
