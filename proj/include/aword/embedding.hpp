#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "aword/codebook.hpp"
#include "aword/encoding.hpp"
#include "aword/error.hpp"
#include "aword/rng.hpp"
#include "aword/types.hpp"

namespace aword {

enum class InitMode { codeword, random, direct };

inline const char* init_mode_name(InitMode m) {
    switch (m) {
        case InitMode::codeword: return "codeword";
        case InitMode::random: return "random";
        default: return "direct";
    }
}

inline InitMode init_mode_from_name(const std::string& name) {
    if (name == "codeword") return InitMode::codeword;
    if (name == "random") return InitMode::random;
    if (name == "direct") return InitMode::direct;
    throw DataError("unknown init mode: " + name);
}

// Word id -> weight vector lookup. Row 0 is the pad word and is always the
// zero vector.
struct EmbeddingTable {
    Mat rows;  // vocab x D
    InitMode init_mode = InitMode::codeword;

    Index vocab_size() const { return rows.rows(); }
    Index dim() const { return rows.cols(); }

    static EmbeddingTable from_codebook(const Codebook& cb) {
        EmbeddingTable t;
        t.init_mode = InitMode::codeword;
        t.rows = Mat::Zero(cb.k() + 1, cb.dim());
        t.rows.bottomRows(cb.k()) = cb.centroids;
        return t;
    }

    // Non-pad rows uniform in [-0.05, 0.05]; row-major draw order.
    static EmbeddingTable random(Index vocab, Index dim, std::uint64_t seed) {
        if (vocab < 1 || dim < 1) throw BadConfig("embedding table needs vocab >= 1 and dim >= 1");
        EmbeddingTable t;
        t.init_mode = InitMode::random;
        t.rows = Mat::Zero(vocab, dim);
        std::mt19937_64 rng(derive_seed(seed, "embedding"));
        for (Index r = 1; r < vocab; ++r)
            for (Index c = 0; c < dim; ++c)
                t.rows(r, c) = (uniform_real(rng) - 0.5) * 0.1;
        return t;
    }

    // Rows are the recorded soft/direct weight vectors in id order.
    static EmbeddingTable from_registry(const WordRegistry& registry) {
        EmbeddingTable t;
        t.init_mode = InitMode::direct;
        const auto& ws = registry.weights();
        const Index dim = ws.empty() ? 1 : ws.front().size();
        t.rows = Mat::Zero(static_cast<Index>(ws.size()) + 1, dim);
        for (std::size_t i = 0; i < ws.size(); ++i) {
            if (ws[i].size() != dim)
                throw InconsistentDim("registry weight " + std::to_string(i + 1) + " has dim " +
                                      std::to_string(ws[i].size()) + ", expected " + std::to_string(dim));
            t.rows.row(static_cast<Index>(i) + 1) = ws[i].transpose();
        }
        return t;
    }

    // Appends registry rows beyond the current vocab (test-time soft/direct
    // words get fresh ids, so the table must grow to cover them).
    void extend_from_registry(const WordRegistry& registry) {
        const Index have = vocab_size() - 1;
        const Index want = registry.count();
        if (want <= have) return;
        Mat grown = Mat::Zero(want + 1, dim());
        grown.topRows(vocab_size()) = rows;
        for (Index id = have + 1; id <= want; ++id) {
            const Vec& w = registry.weight(static_cast<int>(id));
            if (w.size() != dim())
                throw InconsistentDim("registry weight dim " + std::to_string(w.size()) +
                                      " != table dim " + std::to_string(dim()));
            grown.row(id) = w.transpose();
        }
        rows = std::move(grown);
    }
};

// A video as an ordered list of word ids.
struct WordSequence {
    std::vector<int> ids;

    Index length() const { return static_cast<Index>(ids.size()); }
};

struct LabeledSequence {
    std::string video_id;
    int label = 0;
    WordSequence words;
};

// Fixed-length form: truncation keeps the first l_max ids (the head carries
// the early-prediction semantics), padding appends the pad word at the tail.
inline WordSequence pad_or_truncate(const WordSequence& seq, Index l_max) {
    if (l_max < 1) throw BadConfig("l_max must be >= 1");
    WordSequence out;
    out.ids.assign(static_cast<std::size_t>(l_max), 0);
    const Index keep = std::min<Index>(seq.length(), l_max);
    for (Index i = 0; i < keep; ++i) out.ids[static_cast<std::size_t>(i)] = seq.ids[static_cast<std::size_t>(i)];
    return out;
}

// Column t of the result is the table row for ids[t] (cast to T).
template <typename T>
MatT<T> embed(const WordSequence& seq, const EmbeddingTable& table) {
    MatT<T> omega(table.dim(), seq.length());
    for (Index t = 0; t < seq.length(); ++t) {
        const int id = seq.ids[static_cast<std::size_t>(t)];
        if (id < 0 || id >= table.vocab_size())
            throw UnknownWordId("word id " + std::to_string(id) + " outside vocab of " +
                                std::to_string(table.vocab_size()));
        omega.col(t) = table.rows.row(id).transpose().cast<T>();
    }
    return omega;
}

inline Mat embed(const WordSequence& seq, const EmbeddingTable& table) {
    return embed<double>(seq, table);
}

} // namespace aword
