#pragma once
#include <array>
#include <utility>
#include <vector>

#include "aword/embedding.hpp"
#include "aword/error.hpp"
#include "aword/types.hpp"

namespace aword {

// First index holding the maximum; ties resolve to the lowest index.
template <typename T>
Index argmax_index(const VecT<T>& v) {
    Index best = 0;
    for (Index i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

// Leading words covering `tenths`/10 of the sequence, rounded half up.
// Integer arithmetic so 0.5 boundaries never wobble; at least one word stays.
inline WordSequence prefix(const WordSequence& seq, int tenths) {
    if (tenths < 1 || tenths > 10) throw BadConfig("prefix tenths must be in [1,10]");
    const std::size_t l = seq.ids.size();
    if (l == 0) return seq;
    std::size_t keep = (static_cast<std::size_t>(tenths) * l + 5) / 10;
    if (keep < 1) keep = 1;
    WordSequence out;
    out.ids.assign(seq.ids.begin(), seq.ids.begin() + static_cast<std::ptrdiff_t>(keep));
    return out;
}

template <typename Model>
auto predict(const Model& model, const WordSequence& seq, Index l_max) {
    const auto padded = pad_or_truncate(seq, l_max);
    auto probs = model.forward_ids(padded.ids, false, nullptr);
    const int label = static_cast<int>(argmax_index(probs));
    return std::pair{label, std::move(probs)};
}

template <typename Model>
int predict_label(const Model& model, const WordSequence& seq, Index l_max) {
    return predict(model, seq, l_max).first;
}

template <typename Model>
double accuracy(const Model& model, const std::vector<LabeledSequence>& data, Index l_max) {
    if (data.empty()) throw EmptyDataset("accuracy over empty dataset");
    std::size_t correct = 0;
    for (const auto& s : data)
        if (predict_label(model, s.words, l_max) == s.label) ++correct;
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

struct PredictionCurve {
    std::array<double, 10> fractions{};  // 0.1, 0.2, ..., 1.0
    std::array<double, 10> accuracy{};
};

// Accuracy as a function of how much of each sequence the model may see.
// The last entry runs each full sequence through the same path as
// accuracy(), so curve(1.0) equals recognition accuracy exactly.
template <typename Model>
PredictionCurve prediction_curve(const Model& model, const std::vector<LabeledSequence>& data,
                                 Index l_max) {
    if (data.empty()) throw EmptyDataset("prediction curve over empty dataset");
    PredictionCurve curve;
    for (int tenths = 1; tenths <= 10; ++tenths) {
        std::size_t correct = 0;
        for (const auto& s : data)
            if (predict_label(model, prefix(s.words, tenths), l_max) == s.label) ++correct;
        curve.fractions[tenths - 1] = tenths / 10.0;
        curve.accuracy[tenths - 1] = static_cast<double>(correct) / static_cast<double>(data.size());
    }
    return curve;
}

} // namespace aword
