#pragma once
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "aword/embedding.hpp"
#include "aword/error.hpp"
#include "aword/models/predict.hpp"
#include "aword/nn/activations.hpp"
#include "aword/nn/params.hpp"
#include "aword/nn/rmsprop.hpp"
#include "aword/parallel.hpp"
#include "aword/rng.hpp"
#include "aword/types.hpp"

namespace aword {

struct TrainConfig {
    int batch_size = 64;
    int epochs = 25;
    double lr = 1e-4;
    double rho = 0.9;
    double eps = 1e-8;
    std::uint64_t seed = 0;
    Index l_max = 0;     // 0 = longest training sequence
    int threads = 1;
    int grad_chunk = 8;  // samples per accumulation slot; fixed so thread
                         // count never changes the summation order
};

struct EpochStats {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    double train_acc = 0.0;
    double val_acc = 0.0;
};

namespace detail {

template <typename Model>
Index resolve_l_max(const Model& model, const TrainConfig& cfg,
                    const std::vector<LabeledSequence>& train_set) {
    const Index floor = model.min_input_len();
    if (cfg.l_max > 0) {
        if (cfg.l_max < floor)
            throw BadConfig("l_max " + std::to_string(cfg.l_max) +
                            " shorter than the widest filter (" + std::to_string(floor) + ")");
        return cfg.l_max;
    }
    Index longest = 0;
    for (const auto& s : train_set)
        longest = std::max<Index>(longest, static_cast<Index>(s.words.ids.size()));
    return std::max(longest, floor);
}

} // namespace detail

// Mini-batch training with per-epoch shuffling and RMSProp. All randomness
// derives from cfg.seed: the shuffle from (seed, epoch) and each sample's
// dropout masks from (seed, epoch, position in the shuffled order), so the
// result is bit-identical for any thread count. Sets model.cfg.l_max to the
// padded length used and returns per-epoch statistics.
template <typename Model>
std::vector<EpochStats> train(Model& model, const std::vector<LabeledSequence>& train_set,
                              const std::vector<LabeledSequence>& val_set, const TrainConfig& cfg) {
    using T = typename Model::Scalar;
    if (train_set.empty()) throw EmptyDataset("training set is empty");
    if (cfg.batch_size < 1 || cfg.epochs < 1 || cfg.grad_chunk < 1 || cfg.threads < 1)
        throw BadConfig("batch_size, epochs, grad_chunk and threads must be >= 1");
    if (!(cfg.lr > 0.0) || !(cfg.rho >= 0.0 && cfg.rho < 1.0) || !(cfg.eps > 0.0))
        throw BadConfig("need lr > 0, rho in [0,1), eps > 0");
    for (const auto& s : train_set)
        if (s.label < 0 || s.label >= model.classes)
            throw LabelOutOfRange("label " + std::to_string(s.label) + " for " + s.video_id +
                                  " outside [0," + std::to_string(model.classes) + ")");

    const Index l_max = detail::resolve_l_max(model, cfg, train_set);
    model.cfg.l_max = l_max;

    const std::size_t n = train_set.size();
    std::vector<std::vector<int>> padded(n);
    for (std::size_t i = 0; i < n; ++i)
        padded[i] = pad_or_truncate(train_set[i].words, l_max).ids;

    ParamList<T> pspans, gspans;
    model.collect_params(pspans);
    typename Model::Grads total = model.make_grads();
    total.collect_params(gspans);
    if (!model.embedding_trainable()) {
        auto frozen = [](const ParamSpan<T>& s) { return s.name == "embedding"; };
        std::erase_if(pspans, frozen);
        std::erase_if(gspans, frozen);
    }
    Rmsprop<T> opt;
    opt.lr = static_cast<T>(cfg.lr);
    opt.rho = static_cast<T>(cfg.rho);
    opt.eps = static_cast<T>(cfg.eps);

    const std::size_t max_slots =
        chunk_count(static_cast<std::size_t>(cfg.batch_size), static_cast<std::size_t>(cfg.grad_chunk));
    std::vector<typename Model::Grads> slots;
    for (std::size_t c = 0; c < max_slots; ++c) slots.push_back(model.make_grads());
    std::vector<double> slot_loss(max_slots);
    std::vector<std::size_t> slot_correct(max_slots);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::vector<EpochStats> history;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::mt19937_64 shuffle_rng(derive_seed(cfg.seed, "shuffle", static_cast<std::uint64_t>(epoch)));
        shuffle(order, shuffle_rng);

        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t b = std::min(static_cast<std::size_t>(cfg.batch_size), n - start);
            const std::size_t nslots = chunk_count(b, static_cast<std::size_t>(cfg.grad_chunk));
            for (std::size_t c = 0; c < nslots; ++c) {
                slot_loss[c] = 0.0;
                slot_correct[c] = 0;
            }
            parallel_chunks(cfg.threads, b, static_cast<std::size_t>(cfg.grad_chunk),
                            [&](const ChunkRange& cr) {
                auto& g = slots[cr.index];
                g.zero();
                for (std::size_t i = cr.begin; i < cr.end; ++i) {
                    const std::size_t pos = start + i;
                    const std::size_t sample = order[pos];
                    std::mt19937_64 drop_rng(derive_seed(cfg.seed, "dropout",
                                                         static_cast<std::uint64_t>(epoch),
                                                         static_cast<std::uint64_t>(pos)));
                    typename Model::Cache cache;
                    const auto probs = model.forward_ids(padded[sample], true, &drop_rng, &cache);
                    const Index label = train_set[sample].label;
                    slot_loss[cr.index] += static_cast<double>(cross_entropy(probs, label));
                    if (argmax_index(probs) == label) ++slot_correct[cr.index];
                    model.backward(cache, label, g);
                }
            });
            total.zero();
            for (std::size_t c = 0; c < nslots; ++c) {
                total.add(slots[c]);
                loss_sum += slot_loss[c];
                correct += slot_correct[c];
            }
            total.scale(static_cast<T>(1) / static_cast<T>(b));
            opt.step(pspans, gspans);
        }

        EpochStats stats;
        stats.epoch = epoch + 1;
        stats.train_loss = loss_sum / static_cast<double>(n);
        stats.train_acc = static_cast<double>(correct) / static_cast<double>(n);
        stats.val_acc = val_set.empty() ? std::nan("") : accuracy(model, val_set, l_max);
        history.push_back(stats);
    }
    return history;
}

} // namespace aword
