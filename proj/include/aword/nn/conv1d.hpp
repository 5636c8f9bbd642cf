#pragma once
#include <random>
#include <string>

#include "aword/error.hpp"
#include "aword/nn/params.hpp"
#include "aword/types.hpp"

namespace aword {

// Valid (no-padding) temporal correlation over a dim x T input:
//   out(f, t) = b(f) + sum_{tau < width, c < dim} W_f(tau, c) * x(c, t + tau)
// Weights are stored as one filters x (width * dim) matrix; the column block
// [tau * dim, (tau+1) * dim) holds the filter slice at temporal offset tau.
template <typename T>
struct Conv1d {
    MatT<T> w;
    VecT<T> b;
    int width = 1;
    int in_dim = 0;

    Index filters() const { return b.size(); }

    static Conv1d init(int filters, int width, int in_dim, std::mt19937_64& rng) {
        Conv1d layer;
        layer.width = width;
        layer.in_dim = in_dim;
        layer.w.resize(filters, static_cast<Index>(width) * in_dim);
        init_fan_in(layer.w, layer.w.cols(), rng);
        layer.b = VecT<T>::Zero(filters);
        return layer;
    }

    static Conv1d zeros_like(const Conv1d& other) {
        Conv1d g;
        g.width = other.width;
        g.in_dim = other.in_dim;
        g.w = MatT<T>::Zero(other.w.rows(), other.w.cols());
        g.b = VecT<T>::Zero(other.b.size());
        return g;
    }

    Index out_length(Index t) const { return t - width + 1; }

    MatT<T> forward(const MatT<T>& x) const {
        if (x.rows() != in_dim)
            throw ShapeMismatch("conv1d input dim " + std::to_string(x.rows()) + " != " +
                                std::to_string(in_dim));
        if (x.cols() < width)
            throw WindowTooLarge("conv1d window " + std::to_string(width) + " > input length " +
                                 std::to_string(x.cols()));
        const Index t_out = out_length(x.cols());
        MatT<T> out = b.replicate(1, t_out);
        for (int tau = 0; tau < width; ++tau)
            out.noalias() += w.middleCols(static_cast<Index>(tau) * in_dim, in_dim) *
                             x.middleCols(tau, t_out);
        return out;
    }

    // Accumulates parameter gradients into `grad`; writes input gradient into
    // d_x when non-null.
    void backward(const MatT<T>& x, const MatT<T>& d_out, Conv1d& grad, MatT<T>* d_x) const {
        const Index t_out = d_out.cols();
        for (int tau = 0; tau < width; ++tau)
            grad.w.middleCols(static_cast<Index>(tau) * in_dim, in_dim).noalias() +=
                d_out * x.middleCols(tau, t_out).transpose();
        grad.b += d_out.rowwise().sum();
        if (d_x) {
            d_x->setZero(x.rows(), x.cols());
            for (int tau = 0; tau < width; ++tau)
                d_x->middleCols(tau, t_out).noalias() +=
                    w.middleCols(static_cast<Index>(tau) * in_dim, in_dim).transpose() * d_out;
        }
    }

    void collect_params(ParamList<T>& out, const std::string& prefix) {
        collect(out, prefix + ".w", w);
        collect(out, prefix + ".b", b);
    }
};

} // namespace aword
