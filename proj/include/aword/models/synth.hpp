#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "aword/embedding.hpp"
#include "aword/error.hpp"
#include "aword/rng.hpp"
#include "aword/types.hpp"

namespace aword {

struct SynthConfig {
    int classes = 8;
    int vocab = 50;         // word ids 1..vocab; 0 stays reserved for padding
    Index mean_len = 32;
    int train_per_class = 200;
    int test_per_class = 50;
    int perms = 2;          // permutation matrices mixed into each transition
    double eps = 0.1;       // uniform smoothing mass
    std::uint64_t seed = 0;
};

struct SynthDataset {
    std::vector<LabeledSequence> train, test;
    int classes = 0;
    int vocab = 0;
};

inline void validate_stochastic(const Mat& p, bool doubly = false, double tol = 1e-9) {
    const Index v = p.rows();
    if (v == 0 || p.cols() != v) throw NotStochastic("transition matrix must be square and non-empty");
    if ((p.array() < -tol).any()) throw NotStochastic("negative transition probability");
    for (Index r = 0; r < v; ++r)
        if (std::abs(p.row(r).sum() - 1.0) > tol)
            throw NotStochastic("row " + std::to_string(r) + " sums to " + std::to_string(p.row(r).sum()));
    if (doubly)
        for (Index c = 0; c < v; ++c)
            if (std::abs(p.col(c).sum() - 1.0) > tol)
                throw NotStochastic("column " + std::to_string(c) + " sums to " +
                                    std::to_string(p.col(c).sum()));
}

// One transition matrix per class: a mixture of seeded random permutations
// plus eps of uniform mass. Every mixture is doubly stochastic, so all
// classes share the uniform stationary distribution; unigram frequencies
// carry no class signal and only transition structure separates them.
inline std::vector<Mat> make_shared_stationary_transitions(const SynthConfig& cfg) {
    if (cfg.classes < 1 || cfg.vocab < 2 || cfg.perms < 1)
        throw BadConfig("need classes >= 1, vocab >= 2, perms >= 1");
    if (!(cfg.eps >= 0.0 && cfg.eps <= 1.0)) throw BadConfig("eps must be in [0,1]");
    const Index v = cfg.vocab;
    std::vector<Mat> out;
    std::vector<Index> perm(static_cast<std::size_t>(v));
    for (int c = 0; c < cfg.classes; ++c) {
        Mat p = Mat::Constant(v, v, cfg.eps / static_cast<double>(v));
        const double mass = (1.0 - cfg.eps) / static_cast<double>(cfg.perms);
        for (int j = 0; j < cfg.perms; ++j) {
            std::iota(perm.begin(), perm.end(), Index{0});
            std::mt19937_64 rng(derive_seed(cfg.seed, "perm", static_cast<std::uint64_t>(c),
                                            static_cast<std::uint64_t>(j)));
            shuffle(perm, rng);
            for (Index s = 0; s < v; ++s) p(s, perm[static_cast<std::size_t>(s)]) += mass;
        }
        validate_stochastic(p, true);
        out.push_back(std::move(p));
    }
    return out;
}

// States walk the chain; emitted word ids are state + 1 to keep 0 as pad.
inline std::vector<int> sample_chain(const Mat& transitions, Index length, std::mt19937_64& rng) {
    const Index v = transitions.rows();
    if (length < 1) throw BadConfig("chain length must be >= 1");
    std::vector<int> ids;
    ids.reserve(static_cast<std::size_t>(length));
    Index state = static_cast<Index>(uniform_below(rng, static_cast<std::uint64_t>(v)));
    ids.push_back(static_cast<int>(state) + 1);
    for (Index t = 1; t < length; ++t) {
        const double u = uniform_real(rng);
        double acc = 0.0;
        Index next = v - 1;
        for (Index s = 0; s < v; ++s) {
            acc += transitions(state, s);
            if (u < acc) {
                next = s;
                break;
            }
        }
        state = next;
        ids.push_back(static_cast<int>(state) + 1);
    }
    return ids;
}

namespace detail {

inline Index draw_length(const SynthConfig& cfg, std::mt19937_64& rng) {
    const double sd = static_cast<double>(cfg.mean_len) / 5.0;
    const double raw = static_cast<double>(cfg.mean_len) + sd * normal(rng);
    const Index low = std::max<Index>(4, cfg.mean_len / 2);
    const Index high = cfg.mean_len * 2;
    return std::clamp(static_cast<Index>(std::llround(raw)), low, high);
}

} // namespace detail

inline SynthDataset generate_synthetic_dataset(const SynthConfig& cfg) {
    if (cfg.mean_len < 4) throw BadConfig("mean_len must be >= 4");
    if (cfg.train_per_class < 1 || cfg.test_per_class < 0)
        throw BadConfig("need train_per_class >= 1 and test_per_class >= 0");
    const auto transitions = make_shared_stationary_transitions(cfg);
    SynthDataset out;
    out.classes = cfg.classes;
    out.vocab = cfg.vocab;
    auto emit = [&](const char* split, int c, int i, std::vector<LabeledSequence>& dst) {
        std::mt19937_64 rng(derive_seed(cfg.seed, split, static_cast<std::uint64_t>(c),
                                        static_cast<std::uint64_t>(i)));
        LabeledSequence s;
        s.video_id = std::string("synth-") + split + "-c" + std::to_string(c) + "-" + std::to_string(i);
        s.label = c;
        s.words.ids = sample_chain(transitions[static_cast<std::size_t>(c)],
                                   detail::draw_length(cfg, rng), rng);
        dst.push_back(std::move(s));
    };
    for (int c = 0; c < cfg.classes; ++c) {
        for (int i = 0; i < cfg.train_per_class; ++i) emit("train-seq", c, i, out.train);
        for (int i = 0; i < cfg.test_per_class; ++i) emit("test-seq", c, i, out.test);
    }
    return out;
}

// Feature-space view of a word chain, for exercising the full pipeline:
// each word gets a Gaussian prototype vector and frames are prototypes
// plus isotropic noise. Rows of the prototype matrix are words 1..vocab.
inline Mat make_prototypes(int vocab, Index dim, std::uint64_t seed) {
    if (vocab < 1 || dim < 1) throw BadConfig("prototypes need vocab >= 1 and dim >= 1");
    Mat proto(vocab, dim);
    std::mt19937_64 rng(derive_seed(seed, "prototypes"));
    for (Index r = 0; r < proto.rows(); ++r)
        for (Index c = 0; c < proto.cols(); ++c) proto(r, c) = normal(rng);
    return proto;
}

inline Mat chain_to_features(const std::vector<int>& ids, const Mat& prototypes, double sigma,
                             std::mt19937_64& rng) {
    Mat frames(prototypes.cols(), static_cast<Index>(ids.size()));
    for (std::size_t t = 0; t < ids.size(); ++t) {
        const int id = ids[t];
        if (id < 1 || id > prototypes.rows())
            throw UnknownWordId("chain word " + std::to_string(id) + " has no prototype");
        frames.col(static_cast<Index>(t)) = prototypes.row(id - 1).transpose();
        if (sigma > 0.0)
            for (Index r = 0; r < frames.rows(); ++r)
                frames(r, static_cast<Index>(t)) += sigma * normal(rng);
    }
    return frames;
}

} // namespace aword
