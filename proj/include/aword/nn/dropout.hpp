#pragma once
#include <random>
#include <string>

#include "aword/error.hpp"
#include "aword/rng.hpp"
#include "aword/types.hpp"

namespace aword {

// Inverted dropout: in training each element is zeroed with probability
// `rate` and survivors scale by 1/(1-rate); at inference it is the identity.
// The mask holds the applied scale, so backward is an elementwise product.
template <typename T>
struct DropoutMask {
    VecT<T> scale;
};

template <typename T>
VecT<T> dropout(const VecT<T>& x, double rate, std::mt19937_64* rng, bool training,
                DropoutMask<T>* mask = nullptr) {
    if (rate < 0.0 || rate >= 1.0)
        throw InvalidRate("dropout rate " + std::to_string(rate) + " outside [0, 1)");
    if (!training || rate == 0.0) {
        if (mask) mask->scale = VecT<T>::Ones(x.size());
        return x;
    }
    if (!rng) throw BadConfig("dropout in training mode needs an rng");
    const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
    VecT<T> scale(x.size());
    for (Index i = 0; i < x.size(); ++i)
        scale[i] = uniform_real(*rng) < rate ? T(0) : keep_scale;
    VecT<T> y = x.cwiseProduct(scale);
    if (mask) mask->scale = std::move(scale);
    return y;
}

template <typename T>
VecT<T> dropout_backward(const VecT<T>& d_out, const DropoutMask<T>& mask) {
    return d_out.cwiseProduct(mask.scale);
}

} // namespace aword
