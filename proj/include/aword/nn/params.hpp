#pragma once
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "aword/rng.hpp"
#include "aword/types.hpp"

namespace aword {

// Flat view of one parameter block. Collection order is the serialization
// order, the optimizer-state order, and the gradient-pairing order, so every
// structure that owns parameters must collect them identically.
template <typename T>
struct ParamSpan {
    std::string name;
    T* data = nullptr;
    Index rows = 0;
    Index cols = 0;

    Index size() const { return rows * cols; }
};

template <typename T>
using ParamList = std::vector<ParamSpan<T>>;

template <typename T>
void collect(ParamList<T>& out, const std::string& name, MatT<T>& m) {
    out.push_back({name, m.data(), m.rows(), m.cols()});
}

template <typename T>
void collect(ParamList<T>& out, const std::string& name, VecT<T>& v) {
    out.push_back({name, v.data(), v.size(), 1});
}

// Fan-in scaled uniform init, U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
template <typename T>
void init_fan_in(MatT<T>& m, Index fan_in, std::mt19937_64& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Index c = 0; c < m.cols(); ++c)
        for (Index r = 0; r < m.rows(); ++r)
            m(r, c) = static_cast<T>((uniform_real(rng) * 2.0 - 1.0) * bound);
}

} // namespace aword
