#pragma once
#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "aword/embedding.hpp"
#include "aword/error.hpp"
#include "aword/nn/activations.hpp"
#include "aword/nn/conv1d.hpp"
#include "aword/nn/dense.hpp"
#include "aword/nn/dropout.hpp"
#include "aword/nn/lstm.hpp"
#include "aword/nn/params.hpp"
#include "aword/rng.hpp"
#include "aword/types.hpp"

namespace aword {

struct ClstmConfig {
    int conv_width = 5;
    int conv_filters = 200;
    int hidden = 100;       // per LSTM layer, two layers stacked
    double dropout = 0.6;   // on the final hidden state
    bool embedding_trainable = true;
    Index l_max = 0;
};

template <typename T>
struct ClstmGrads {
    MatT<T> embedding;
    Conv1d<T> conv;
    LstmLayer<T> lstm1, lstm2;
    Dense<T> fc;

    void zero() {
        embedding.setZero();
        conv.w.setZero();
        conv.b.setZero();
        lstm1.wx.setZero();
        lstm1.wh.setZero();
        lstm1.b.setZero();
        lstm2.wx.setZero();
        lstm2.wh.setZero();
        lstm2.b.setZero();
        fc.w.setZero();
        fc.b.setZero();
    }

    void add(const ClstmGrads& other) {
        embedding += other.embedding;
        conv.w += other.conv.w;
        conv.b += other.conv.b;
        lstm1.wx += other.lstm1.wx;
        lstm1.wh += other.lstm1.wh;
        lstm1.b += other.lstm1.b;
        lstm2.wx += other.lstm2.wx;
        lstm2.wh += other.lstm2.wh;
        lstm2.b += other.lstm2.b;
        fc.w += other.fc.w;
        fc.b += other.fc.b;
    }

    void scale(T s) {
        embedding *= s;
        conv.w *= s;
        conv.b *= s;
        lstm1.wx *= s;
        lstm1.wh *= s;
        lstm1.b *= s;
        lstm2.wx *= s;
        lstm2.wh *= s;
        lstm2.b *= s;
        fc.w *= s;
        fc.b *= s;
    }

    void collect_params(ParamList<T>& out) {
        collect(out, "embedding", embedding);
        conv.collect_params(out, "conv");
        lstm1.collect_params(out, "lstm1");
        lstm2.collect_params(out, "lstm2");
        fc.collect_params(out, "fc");
    }
};

// Single convolution over the word sequence, ReLU, two stacked LSTMs; the
// last hidden state feeds a dense softmax head through dropout.
template <typename T>
struct ClstmModel {
    using Scalar = T;

    ClstmConfig cfg;
    int classes = 0;
    MatT<T> embedding;  // vocab x D, row 0 is the pad word
    Conv1d<T> conv;
    LstmLayer<T> lstm1, lstm2;
    Dense<T> fc;

    Index dim() const { return embedding.cols(); }
    Index vocab() const { return embedding.rows(); }
    bool embedding_trainable() const { return cfg.embedding_trainable; }
    Index min_input_len() const { return std::max<Index>(1, conv.width); }

    struct Cache {
        std::vector<int> ids;
        MatT<T> omega;
        MatT<T> conv_pre;
        typename LstmLayer<T>::SeqCache seq1, seq2;
        MatT<T> h1, h2;
        VecT<T> h_last, h_dropped;
        DropoutMask<T> mask;
        VecT<T> probs;
    };

    using Grads = ClstmGrads<T>;

    Grads make_grads() const {
        Grads g;
        g.embedding = MatT<T>::Zero(embedding.rows(), embedding.cols());
        g.conv = Conv1d<T>::zeros_like(conv);
        g.lstm1 = LstmLayer<T>::zeros_like(lstm1);
        g.lstm2 = LstmLayer<T>::zeros_like(lstm2);
        g.fc = Dense<T>::zeros_like(fc);
        return g;
    }

    VecT<T> forward(const MatT<T>& omega, bool training, std::mt19937_64* rng,
                    Cache* cache = nullptr) const {
        if (omega.rows() != dim())
            throw ShapeMismatch("clstm input dim " + std::to_string(omega.rows()) + " != " +
                                std::to_string(dim()));
        const MatT<T> pre = conv.forward(omega);
        const MatT<T> act = relu(pre);
        typename LstmLayer<T>::SeqCache seq1, seq2;
        const MatT<T> h1 = lstm1.forward(act, cache ? &seq1 : nullptr);
        const MatT<T> h2 = lstm2.forward(h1, cache ? &seq2 : nullptr);
        const VecT<T> h_last = h2.col(h2.cols() - 1);
        DropoutMask<T> mask;
        const VecT<T> h_dropped = dropout(h_last, cfg.dropout, rng, training, &mask);
        const VecT<T> probs = softmax<T>(fc.forward(h_dropped));
        if (cache) {
            cache->omega = omega;
            cache->conv_pre = pre;
            cache->seq1 = std::move(seq1);
            cache->seq2 = std::move(seq2);
            cache->h1 = h1;
            cache->h2 = h2;
            cache->h_last = h_last;
            cache->h_dropped = h_dropped;
            cache->mask = std::move(mask);
            cache->probs = probs;
        }
        return probs;
    }

    VecT<T> forward_ids(const std::vector<int>& ids, bool training, std::mt19937_64* rng,
                        Cache* cache = nullptr) const {
        MatT<T> omega(dim(), static_cast<Index>(ids.size()));
        for (std::size_t t = 0; t < ids.size(); ++t) {
            const int id = ids[t];
            if (id < 0 || id >= vocab())
                throw UnknownWordId("word id " + std::to_string(id) + " outside vocab of " +
                                    std::to_string(vocab()));
            omega.col(static_cast<Index>(t)) = embedding.row(id).transpose();
        }
        const VecT<T> probs = forward(omega, training, rng, cache);
        if (cache) cache->ids = ids;
        return probs;
    }

    void backward(const Cache& cache, Index label, Grads& grads, MatT<T>* d_omega_out = nullptr) const {
        VecT<T> d_logits = softmax_xent_backward(cache.probs, label);
        VecT<T> d_h_dropped;
        fc.backward(cache.h_dropped, d_logits, grads.fc, &d_h_dropped);
        const VecT<T> d_h_last = dropout_backward(d_h_dropped, cache.mask);

        MatT<T> d_h2 = MatT<T>::Zero(cache.h2.rows(), cache.h2.cols());
        d_h2.col(d_h2.cols() - 1) = d_h_last;
        MatT<T> d_h1;
        lstm2.backward(cache.seq2, d_h2, grads.lstm2, &d_h1);
        MatT<T> d_act;
        lstm1.backward(cache.seq1, d_h1, grads.lstm1, &d_act);
        const MatT<T> d_pre = relu_backward(cache.conv_pre, d_act);
        MatT<T> d_omega;
        conv.backward(cache.omega, d_pre, grads.conv, &d_omega);

        if (!cache.ids.empty()) {
            for (std::size_t t = 0; t < cache.ids.size(); ++t) {
                const int id = cache.ids[t];
                if (id != 0) grads.embedding.row(id) += d_omega.col(static_cast<Index>(t)).transpose();
            }
        }
        if (d_omega_out) *d_omega_out = std::move(d_omega);
    }

    void collect_params(ParamList<T>& out) {
        collect(out, "embedding", embedding);
        conv.collect_params(out, "conv");
        lstm1.collect_params(out, "lstm1");
        lstm2.collect_params(out, "lstm2");
        fc.collect_params(out, "fc");
    }

    Index param_count() const {
        ParamList<T> spans;
        const_cast<ClstmModel*>(this)->collect_params(spans);
        Index n = 0;
        for (const auto& s : spans) n += s.size();
        return n;
    }
};

template <typename T>
ClstmModel<T> build_clstm(int classes, const EmbeddingTable& table, const ClstmConfig& cfg,
                          std::uint64_t seed) {
    if (classes < 2) throw BadConfig("clstm needs at least 2 classes");
    if (cfg.conv_width < 1 || cfg.conv_filters < 1 || cfg.hidden < 1)
        throw BadConfig("clstm layer sizes must be >= 1");
    if (cfg.l_max != 0 && cfg.l_max < cfg.conv_width)
        throw BadConfig("l_max " + std::to_string(cfg.l_max) + " shorter than filter width " +
                        std::to_string(cfg.conv_width));

    ClstmModel<T> model;
    model.cfg = cfg;
    model.classes = classes;
    model.embedding = table.rows.cast<T>();
    std::mt19937_64 rng(derive_seed(seed, "clstm-init"));
    const int dim = static_cast<int>(table.dim());
    model.conv = Conv1d<T>::init(cfg.conv_filters, cfg.conv_width, dim, rng);
    model.lstm1 = LstmLayer<T>::init(cfg.hidden, cfg.conv_filters, rng);
    model.lstm2 = LstmLayer<T>::init(cfg.hidden, cfg.hidden, rng);
    model.fc = Dense<T>::init(classes, cfg.hidden, rng);
    return model;
}

template <typename T>
VecT<T> forward_clstm(const ClstmModel<T>& model, const MatT<T>& omega, bool training = false,
                      std::mt19937_64* rng = nullptr) {
    return model.forward(omega, training, rng);
}

} // namespace aword
