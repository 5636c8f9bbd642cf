#pragma once
#include <cmath>
#include <string>
#include <vector>

#include "aword/error.hpp"
#include "aword/nn/params.hpp"

namespace aword {

// RMSProp:  acc <- rho * acc + (1 - rho) * g^2;  p <- p - lr * g / (sqrt(acc) + eps).
template <typename T>
struct Rmsprop {
    T lr = static_cast<T>(1e-4);
    T rho = static_cast<T>(0.9);
    T eps = static_cast<T>(1e-8);

    std::vector<std::vector<T>> acc;

    void step(const ParamList<T>& params, const ParamList<T>& grads) {
        if (params.size() != grads.size())
            throw ShapeMismatch("rmsprop: param/grad list size mismatch");
        if (acc.empty()) {
            acc.resize(params.size());
            for (std::size_t i = 0; i < params.size(); ++i)
                acc[i].assign(static_cast<std::size_t>(params[i].size()), T(0));
        }
        for (std::size_t i = 0; i < params.size(); ++i) {
            const auto& p = params[i];
            const auto& g = grads[i];
            if (p.size() != g.size() || acc[i].size() != static_cast<std::size_t>(p.size()))
                throw ShapeMismatch("rmsprop: block " + p.name + " shape mismatch");
            T* a = acc[i].data();
            for (Index j = 0; j < p.size(); ++j) {
                const T gj = g.data[j];
                a[j] = rho * a[j] + (T(1) - rho) * gj * gj;
                p.data[j] -= lr * gj / (std::sqrt(a[j]) + eps);
            }
        }
    }
};

} // namespace aword
