#pragma once
#include <cmath>
#include <string>

#include "aword/error.hpp"
#include "aword/types.hpp"

namespace aword {

template <typename Derived>
auto relu(const Eigen::MatrixBase<Derived>& x) {
    return x.cwiseMax(typename Derived::Scalar(0)).eval();
}

// Gradient through relu given the pre-activation values.
template <typename T>
MatT<T> relu_backward(const MatT<T>& pre, const MatT<T>& d_out) {
    return (pre.array() > T(0)).template cast<T>().matrix().cwiseProduct(d_out);
}

template <typename T>
VecT<T> relu_backward(const VecT<T>& pre, const VecT<T>& d_out) {
    return (pre.array() > T(0)).template cast<T>().matrix().cwiseProduct(d_out);
}

// Shift-invariant softmax.
template <typename T>
VecT<T> softmax(const VecT<T>& z) {
    const T m = z.maxCoeff();
    VecT<T> p = (z.array() - m).exp();
    return p / p.sum();
}

// -log p[label], clamped so a confidently wrong model yields a finite loss.
template <typename T>
T cross_entropy(const VecT<T>& p, Index label) {
    if (label < 0 || label >= p.size())
        throw LabelOutOfRange("label " + std::to_string(label) + " for " + std::to_string(p.size()) +
                              " classes");
    return -std::log(std::max(p[label], T(1e-12)));
}

// Gradient of cross_entropy(softmax(z), label) with respect to z.
template <typename T>
VecT<T> softmax_xent_backward(const VecT<T>& probs, Index label) {
    VecT<T> d = probs;
    d[label] -= T(1);
    return d;
}

} // namespace aword
