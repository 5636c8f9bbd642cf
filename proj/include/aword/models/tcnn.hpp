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
#include "aword/nn/params.hpp"
#include "aword/nn/pooling.hpp"
#include "aword/rng.hpp"
#include "aword/types.hpp"

namespace aword {

struct TcnnConfig {
    std::vector<int> widths{3, 4, 5};
    std::vector<int> filters{200, 200, 200};
    double dropout_concat = 0.2;  // after the concatenated pool vector
    double dropout_fc = 0.8;      // between the two FC layers
    int fc_hidden = 256;
    bool masked_pool = false;     // exclude windows that see only padding
    bool embedding_trainable = true;
    Index l_max = 0;              // 0 = set later (train derives it from data)
};

template <typename T>
struct TcnnGrads {
    MatT<T> embedding;
    std::vector<Conv1d<T>> convs;
    Dense<T> fc1, fc2;

    void zero() {
        embedding.setZero();
        for (auto& c : convs) {
            c.w.setZero();
            c.b.setZero();
        }
        fc1.w.setZero();
        fc1.b.setZero();
        fc2.w.setZero();
        fc2.b.setZero();
    }

    void add(const TcnnGrads& other) {
        embedding += other.embedding;
        for (std::size_t l = 0; l < convs.size(); ++l) {
            convs[l].w += other.convs[l].w;
            convs[l].b += other.convs[l].b;
        }
        fc1.w += other.fc1.w;
        fc1.b += other.fc1.b;
        fc2.w += other.fc2.w;
        fc2.b += other.fc2.b;
    }

    void scale(T s) {
        embedding *= s;
        for (auto& c : convs) {
            c.w *= s;
            c.b *= s;
        }
        fc1.w *= s;
        fc1.b *= s;
        fc2.w *= s;
        fc2.b *= s;
    }

    void collect_params(ParamList<T>& out) {
        collect(out, "embedding", embedding);
        for (std::size_t l = 0; l < convs.size(); ++l)
            convs[l].collect_params(out, "conv" + std::to_string(l));
        fc1.collect_params(out, "fc1");
        fc2.collect_params(out, "fc2");
    }
};

// Parallel bank of 1D convolutions (one width each), ReLU, global max pool,
// concatenation, then two FC layers with dropout and a softmax head.
template <typename T>
struct TcnnModel {
    using Scalar = T;

    TcnnConfig cfg;
    int classes = 0;
    MatT<T> embedding;  // vocab x D, row 0 is the pad word (kept zero)
    std::vector<Conv1d<T>> convs;
    Dense<T> fc1, fc2;

    Index dim() const { return embedding.cols(); }
    Index vocab() const { return embedding.rows(); }
    bool embedding_trainable() const { return cfg.embedding_trainable; }

    Index min_input_len() const {
        Index m = 1;
        for (const auto& c : convs) m = std::max<Index>(m, c.width);
        return m;
    }

    Index concat_size() const {
        Index v = 0;
        for (const auto& c : convs) v += c.filters();
        return v;
    }

    struct Cache {
        std::vector<int> ids;  // empty when forward ran on a raw matrix
        MatT<T> omega;
        Index real_len = -1;
        std::vector<MatT<T>> conv_pre;
        std::vector<PoolResult<T>> pooled;
        VecT<T> concat, concat_dropped, fc1_pre, fc1_dropped;
        DropoutMask<T> mask_concat, mask_fc;
        VecT<T> probs;
    };

    using Grads = TcnnGrads<T>;

    Grads make_grads() const {
        Grads g;
        g.embedding = MatT<T>::Zero(embedding.rows(), embedding.cols());
        for (const auto& c : convs) g.convs.push_back(Conv1d<T>::zeros_like(c));
        g.fc1 = Dense<T>::zeros_like(fc1);
        g.fc2 = Dense<T>::zeros_like(fc2);
        return g;
    }

    VecT<T> forward(const MatT<T>& omega, bool training, std::mt19937_64* rng,
                    Cache* cache = nullptr, Index real_len = -1) const {
        if (omega.rows() != dim())
            throw ShapeMismatch("tcnn input dim " + std::to_string(omega.rows()) + " != " +
                                std::to_string(dim()));
        const std::size_t layers = convs.size();
        std::vector<MatT<T>> pre(layers);
        std::vector<PoolResult<T>> pooled(layers);
        VecT<T> concat(concat_size());
        Index at = 0;
        for (std::size_t l = 0; l < layers; ++l) {
            pre[l] = convs[l].forward(omega);
            const MatT<T> act = relu(pre[l]);
            std::optional<Index> valid;
            if (cfg.masked_pool && real_len >= 1)
                valid = std::min<Index>(act.cols(), real_len);
            pooled[l] = global_max_pool(act, valid);
            concat.segment(at, convs[l].filters()) = pooled[l].values;
            at += convs[l].filters();
        }
        DropoutMask<T> m1, m2;
        const VecT<T> concat_dropped = dropout(concat, cfg.dropout_concat, rng, training, &m1);
        const VecT<T> fc1_pre = fc1.forward(concat_dropped);
        const VecT<T> fc1_act = relu(fc1_pre);
        const VecT<T> fc1_dropped = dropout(fc1_act, cfg.dropout_fc, rng, training, &m2);
        const VecT<T> probs = softmax<T>(fc2.forward(fc1_dropped));
        if (cache) {
            cache->omega = omega;
            cache->real_len = real_len;
            cache->conv_pre = std::move(pre);
            cache->pooled = std::move(pooled);
            cache->concat = concat;
            cache->concat_dropped = concat_dropped;
            cache->fc1_pre = fc1_pre;
            cache->fc1_dropped = fc1_dropped;
            cache->mask_concat = std::move(m1);
            cache->mask_fc = std::move(m2);
            cache->probs = probs;
        }
        return probs;
    }

    VecT<T> forward_ids(const std::vector<int>& ids, bool training, std::mt19937_64* rng,
                        Cache* cache = nullptr) const {
        Index real_len = 0;
        MatT<T> omega(dim(), static_cast<Index>(ids.size()));
        for (std::size_t t = 0; t < ids.size(); ++t) {
            const int id = ids[t];
            if (id < 0 || id >= vocab())
                throw UnknownWordId("word id " + std::to_string(id) + " outside vocab of " +
                                    std::to_string(vocab()));
            if (id != 0) ++real_len;
            omega.col(static_cast<Index>(t)) = embedding.row(id).transpose();
        }
        const VecT<T> probs = forward(omega, training, rng, cache, std::max<Index>(real_len, 1));
        if (cache) cache->ids = ids;
        return probs;
    }

    // Accumulates into `grads`; returns the input gradient through d_omega
    // when requested. Embedding rows only receive gradient when the forward
    // ran from ids; the pad row never does.
    void backward(const Cache& cache, Index label, Grads& grads, MatT<T>* d_omega_out = nullptr) const {
        VecT<T> d_logits = softmax_xent_backward(cache.probs, label);
        VecT<T> d_fc1_dropped;
        fc2.backward(cache.fc1_dropped, d_logits, grads.fc2, &d_fc1_dropped);
        const VecT<T> d_fc1_act = dropout_backward(d_fc1_dropped, cache.mask_fc);
        const VecT<T> d_fc1_pre = relu_backward(cache.fc1_pre, d_fc1_act);
        VecT<T> d_concat_dropped;
        fc1.backward(cache.concat_dropped, d_fc1_pre, grads.fc1, &d_concat_dropped);
        const VecT<T> d_concat = dropout_backward(d_concat_dropped, cache.mask_concat);

        MatT<T> d_omega = MatT<T>::Zero(cache.omega.rows(), cache.omega.cols());
        MatT<T> d_omega_l;
        Index at = 0;
        for (std::size_t l = 0; l < convs.size(); ++l) {
            const VecT<T> d_pool = d_concat.segment(at, convs[l].filters());
            at += convs[l].filters();
            const MatT<T> d_act = global_max_pool_backward(cache.pooled[l], d_pool,
                                                           cache.conv_pre[l].rows(),
                                                           cache.conv_pre[l].cols());
            const MatT<T> d_pre = relu_backward(cache.conv_pre[l], d_act);
            convs[l].backward(cache.omega, d_pre, grads.convs[l], &d_omega_l);
            d_omega += d_omega_l;
        }
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
        for (std::size_t l = 0; l < convs.size(); ++l)
            convs[l].collect_params(out, "conv" + std::to_string(l));
        fc1.collect_params(out, "fc1");
        fc2.collect_params(out, "fc2");
    }

    Index param_count() const {
        ParamList<T> spans;
        const_cast<TcnnModel*>(this)->collect_params(spans);
        Index n = 0;
        for (const auto& s : spans) n += s.size();
        return n;
    }
};

template <typename T>
TcnnModel<T> build_tcnn(int classes, const EmbeddingTable& table, const TcnnConfig& cfg,
                        std::uint64_t seed) {
    if (classes < 2) throw BadConfig("tcnn needs at least 2 classes");
    if (cfg.widths.empty() || cfg.widths.size() != cfg.filters.size())
        throw BadConfig("tcnn widths and filters must be non-empty and same length");
    for (std::size_t l = 0; l < cfg.widths.size(); ++l)
        if (cfg.widths[l] < 1 || cfg.filters[l] < 1)
            throw BadConfig("tcnn widths and filter counts must be >= 1");
    if (cfg.fc_hidden < 1) throw BadConfig("tcnn fc_hidden must be >= 1");
    if (cfg.l_max != 0) {
        for (int w : cfg.widths)
            if (cfg.l_max < w)
                throw BadConfig("l_max " + std::to_string(cfg.l_max) + " shorter than filter width " +
                                std::to_string(w));
    }

    TcnnModel<T> model;
    model.cfg = cfg;
    model.classes = classes;
    model.embedding = table.rows.cast<T>();
    std::mt19937_64 rng(derive_seed(seed, "tcnn-init"));
    const int dim = static_cast<int>(table.dim());
    for (std::size_t l = 0; l < cfg.widths.size(); ++l)
        model.convs.push_back(Conv1d<T>::init(cfg.filters[l], cfg.widths[l], dim, rng));
    model.fc1 = Dense<T>::init(cfg.fc_hidden, model.concat_size(), rng);
    model.fc2 = Dense<T>::init(classes, cfg.fc_hidden, rng);
    return model;
}

// Convenience entry point: probabilities for one embedded sequence.
template <typename T>
VecT<T> forward_tcnn(const TcnnModel<T>& model, const MatT<T>& omega, bool training = false,
                     std::mt19937_64* rng = nullptr) {
    return model.forward(omega, training, rng);
}

} // namespace aword
