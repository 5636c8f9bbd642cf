#pragma once
#include <random>
#include <string>

#include "aword/error.hpp"
#include "aword/nn/params.hpp"
#include "aword/types.hpp"

namespace aword {

// Fully connected layer, y = W x + b.
template <typename T>
struct Dense {
    MatT<T> w;  // out x in
    VecT<T> b;  // out

    static Dense init(Index out, Index in, std::mt19937_64& rng) {
        Dense layer;
        layer.w.resize(out, in);
        init_fan_in(layer.w, in, rng);
        layer.b = VecT<T>::Zero(out);
        return layer;
    }

    static Dense zeros_like(const Dense& other) {
        Dense g;
        g.w = MatT<T>::Zero(other.w.rows(), other.w.cols());
        g.b = VecT<T>::Zero(other.b.size());
        return g;
    }

    VecT<T> forward(const VecT<T>& x) const {
        if (x.size() != w.cols())
            throw ShapeMismatch("dense input " + std::to_string(x.size()) + " != " +
                                std::to_string(w.cols()));
        return w * x + b;
    }

    void backward(const VecT<T>& x, const VecT<T>& d_out, Dense& grad, VecT<T>* d_x) const {
        grad.w.noalias() += d_out * x.transpose();
        grad.b += d_out;
        if (d_x) d_x->noalias() = w.transpose() * d_out;
    }

    void collect_params(ParamList<T>& out, const std::string& prefix) {
        collect(out, prefix + ".w", w);
        collect(out, prefix + ".b", b);
    }
};

} // namespace aword
