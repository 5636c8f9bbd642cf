#pragma once
#include <cmath>

#include "aword/error.hpp"
#include "aword/pca.hpp"
#include "aword/types.hpp"

namespace aword {

// How the temporal and spatial streams share the fused vector: `ratio` is the
// fraction of fused_dim taken from the temporal stream.
struct FusionConfig {
    double ratio = 0.5;   // r in [0, 1]
    Index fused_dim = 512;
};

inline Index temporal_share(const FusionConfig& cfg) {
    return static_cast<Index>(std::llround(cfg.ratio * static_cast<double>(cfg.fused_dim)));
}

// Temporal-first concatenation of the leading projected coordinates:
// first round(r * D') from the temporal projection, the remainder from the
// spatial one. Projection happens before slicing.
inline Vec fuse(const Vec& x_t, const Vec& x_s, const FusionConfig& cfg,
                const PcaModel& pca_t, const PcaModel& pca_s) {
    if (cfg.ratio < 0.0 || cfg.ratio > 1.0)
        throw BadConfig("fusion ratio must be in [0, 1]");
    if (cfg.fused_dim < 1) throw BadConfig("fused_dim must be >= 1");

    const Index n_t = temporal_share(cfg);
    const Index n_s = cfg.fused_dim - n_t;
    if (pca_t.out_dim() < n_t)
        throw InsufficientComponents("temporal pca has " + std::to_string(pca_t.out_dim()) +
                                     " components, need " + std::to_string(n_t));
    if (pca_s.out_dim() < n_s)
        throw InsufficientComponents("spatial pca has " + std::to_string(pca_s.out_dim()) +
                                     " components, need " + std::to_string(n_s));

    Vec out(cfg.fused_dim);
    if (n_t > 0) out.head(n_t) = pca_project(pca_t, x_t).head(n_t);
    if (n_s > 0) out.tail(n_s) = pca_project(pca_s, x_s).head(n_s);
    return out;
}

} // namespace aword
