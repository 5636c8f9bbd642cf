#pragma once
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "aword/error.hpp"
#include "aword/nn/params.hpp"
#include "aword/types.hpp"

namespace aword {

// Standard LSTM layer with sigmoid input/forget/output gates and a tanh
// candidate. Gate pre-activations are stacked [i; f; g; o], H rows each.
template <typename T>
struct LstmLayer {
    MatT<T> wx;  // 4H x in
    MatT<T> wh;  // 4H x H
    VecT<T> b;   // 4H
    int hidden = 0;
    int in_dim = 0;

    static LstmLayer init(int hidden, int in_dim, std::mt19937_64& rng) {
        LstmLayer layer;
        layer.hidden = hidden;
        layer.in_dim = in_dim;
        layer.wx.resize(4 * hidden, in_dim);
        init_fan_in(layer.wx, in_dim, rng);
        layer.wh.resize(4 * hidden, hidden);
        init_fan_in(layer.wh, hidden, rng);
        layer.b = VecT<T>::Zero(4 * hidden);
        return layer;
    }

    static LstmLayer zeros_like(const LstmLayer& other) {
        LstmLayer g;
        g.hidden = other.hidden;
        g.in_dim = other.in_dim;
        g.wx = MatT<T>::Zero(other.wx.rows(), other.wx.cols());
        g.wh = MatT<T>::Zero(other.wh.rows(), other.wh.cols());
        g.b = VecT<T>::Zero(other.b.size());
        return g;
    }

    struct StepCache {
        VecT<T> x, h_prev, c_prev;
        VecT<T> i, f, g, o, c, tanh_c;
    };

    struct State {
        VecT<T> h, c;
    };

    State zero_state() const {
        return {VecT<T>::Zero(hidden), VecT<T>::Zero(hidden)};
    }

    static VecT<T> sigmoid(const VecT<T>& z) {
        return ((-z.array()).exp() + T(1)).inverse().matrix();
    }

    State cell_forward(const VecT<T>& x, const State& prev, StepCache* cache = nullptr) const {
        if (x.size() != in_dim)
            throw ShapeMismatch("lstm input " + std::to_string(x.size()) + " != " +
                                std::to_string(in_dim));
        const VecT<T> z = wx * x + wh * prev.h + b;
        const Index h = hidden;
        State next;
        const VecT<T> i = sigmoid(z.segment(0, h));
        const VecT<T> f = sigmoid(z.segment(h, h));
        const VecT<T> g = z.segment(2 * h, h).array().tanh().matrix();
        const VecT<T> o = sigmoid(z.segment(3 * h, h));
        next.c = f.cwiseProduct(prev.c) + i.cwiseProduct(g);
        const VecT<T> tanh_c = next.c.array().tanh().matrix();
        next.h = o.cwiseProduct(tanh_c);
        if (cache) *cache = {x, prev.h, prev.c, i, f, g, o, next.c, tanh_c};
        return next;
    }

    struct SeqCache {
        std::vector<StepCache> steps;
    };

    // Runs the whole sequence from a zero state; column t of the result is h_t.
    MatT<T> forward(const MatT<T>& x_seq, SeqCache* cache = nullptr) const {
        const Index steps = x_seq.cols();
        if (steps < 1) throw ShapeMismatch("lstm sequence is empty");
        if (cache) cache->steps.resize(static_cast<std::size_t>(steps));
        MatT<T> h_seq(hidden, steps);
        State state = zero_state();
        for (Index t = 0; t < steps; ++t) {
            state = cell_forward(x_seq.col(t), state,
                                 cache ? &cache->steps[static_cast<std::size_t>(t)] : nullptr);
            h_seq.col(t) = state.h;
        }
        return h_seq;
    }

    // Backpropagation through time. d_h holds the upstream gradient for every
    // h_t (zero columns where nothing consumed the output). Parameter
    // gradients accumulate into `grad`; d_x gets the input-sequence gradient.
    void backward(const SeqCache& cache, const MatT<T>& d_h, LstmLayer& grad, MatT<T>* d_x) const {
        const Index steps = d_h.cols();
        const Index h = hidden;
        if (d_x) d_x->setZero(in_dim, steps);
        VecT<T> dh_next = VecT<T>::Zero(h);
        VecT<T> dc_next = VecT<T>::Zero(h);
        for (Index t = steps - 1; t >= 0; --t) {
            const StepCache& s = cache.steps[static_cast<std::size_t>(t)];
            const VecT<T> dh = d_h.col(t) + dh_next;
            const VecT<T> d_o = dh.cwiseProduct(s.tanh_c);
            const VecT<T> dc = dh.cwiseProduct(s.o).cwiseProduct(
                                   (T(1) - s.tanh_c.array().square()).matrix()) +
                               dc_next;
            const VecT<T> d_i = dc.cwiseProduct(s.g);
            const VecT<T> d_f = dc.cwiseProduct(s.c_prev);
            const VecT<T> d_g = dc.cwiseProduct(s.i);

            VecT<T> dz(4 * h);
            dz.segment(0, h) = d_i.cwiseProduct(s.i).cwiseProduct((T(1) - s.i.array()).matrix());
            dz.segment(h, h) = d_f.cwiseProduct(s.f).cwiseProduct((T(1) - s.f.array()).matrix());
            dz.segment(2 * h, h) = d_g.cwiseProduct((T(1) - s.g.array().square()).matrix());
            dz.segment(3 * h, h) = d_o.cwiseProduct(s.o).cwiseProduct((T(1) - s.o.array()).matrix());

            grad.wx.noalias() += dz * s.x.transpose();
            grad.wh.noalias() += dz * s.h_prev.transpose();
            grad.b += dz;
            if (d_x) d_x->col(t) = wx.transpose() * dz;
            dh_next.noalias() = wh.transpose() * dz;
            dc_next = dc.cwiseProduct(s.f);
        }
    }

    void collect_params(ParamList<T>& out, const std::string& prefix) {
        collect(out, prefix + ".wx", wx);
        collect(out, prefix + ".wh", wh);
        collect(out, prefix + ".b", b);
    }
};

} // namespace aword
