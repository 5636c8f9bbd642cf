#pragma once
#include <optional>
#include <string>
#include <vector>

#include "aword/error.hpp"
#include "aword/types.hpp"

namespace aword {

// Per-filter maximum across time plus the winning positions, which the
// backward pass routes gradient through.
template <typename T>
struct PoolResult {
    VecT<T> values;
    std::vector<Index> argmax;
};

// valid limits the pool to the first `valid` time steps (masked pooling for
// padded sequences). Ties pick the earliest position.
template <typename T>
PoolResult<T> global_max_pool(const MatT<T>& act, std::optional<Index> valid = std::nullopt) {
    if (act.cols() < 1) throw ShapeMismatch("global_max_pool: empty activation");
    Index span = act.cols();
    if (valid) {
        if (*valid < 1) throw EmptyMask("global_max_pool: mask selects no positions");
        if (*valid > act.cols())
            throw ShapeMismatch("global_max_pool: mask length " + std::to_string(*valid) +
                                " > activation length " + std::to_string(act.cols()));
        span = *valid;
    }
    PoolResult<T> out;
    out.values.resize(act.rows());
    out.argmax.resize(static_cast<std::size_t>(act.rows()));
    for (Index f = 0; f < act.rows(); ++f) {
        Index best = 0;
        T best_v = act(f, 0);
        for (Index t = 1; t < span; ++t) {
            if (act(f, t) > best_v) {
                best_v = act(f, t);
                best = t;
            }
        }
        out.values[f] = best_v;
        out.argmax[static_cast<std::size_t>(f)] = best;
    }
    return out;
}

template <typename T>
MatT<T> global_max_pool_backward(const PoolResult<T>& pooled, const VecT<T>& d_out,
                                 Index rows, Index cols) {
    MatT<T> d_act = MatT<T>::Zero(rows, cols);
    for (Index f = 0; f < rows; ++f)
        d_act(f, pooled.argmax[static_cast<std::size_t>(f)]) = d_out[f];
    return d_act;
}

} // namespace aword
