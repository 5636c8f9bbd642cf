#pragma once
#include <string>
#include <vector>

#include "aword/error.hpp"
#include "aword/types.hpp"

namespace aword {

enum class Stream { temporal, spatial, fused };

inline const char* stream_name(Stream s) {
    switch (s) {
        case Stream::temporal: return "temporal";
        case Stream::spatial: return "spatial";
        default: return "fused";
    }
}

inline Stream stream_from_name(const std::string& name) {
    if (name == "temporal") return Stream::temporal;
    if (name == "spatial") return Stream::spatial;
    if (name == "fused") return Stream::fused;
    throw DataError("unknown stream name: " + name);
}

// One video as a sequence of frame-level feature vectors, stored dim x frames
// (one column per frame). frame_stride and stack_depth describe how the
// upstream extractor sampled frames; they are carried as metadata only.
struct FeatureSequence {
    std::string video_id;
    int label = 0;
    Mat frames;  // D x l
    Stream stream = Stream::fused;
    int frame_stride = 5;
    int stack_depth = 10;

    Index dim() const { return frames.rows(); }
    Index length() const { return frames.cols(); }

    void validate() const {
        if (frames.rows() < 1 || frames.cols() < 1)
            throw DataError("feature sequence " + video_id + " is empty");
        if (!frames.allFinite())
            throw NonFiniteInput("feature sequence " + video_id + " has non-finite values");
        if (frame_stride < 1 || stack_depth < 1)
            throw DataError("feature sequence " + video_id + " has invalid stride metadata");
    }
};

// Stacks all frames of all sequences as rows of one matrix (fit input for
// PCA and k-means).
inline Mat stack_frames(const std::vector<FeatureSequence>& seqs) {
    Index total = 0;
    Index dim = 0;
    for (const auto& s : seqs) {
        if (dim == 0) dim = s.dim();
        else if (s.dim() != dim)
            throw DimMismatch("sequence " + s.video_id + " dim " + std::to_string(s.dim()) +
                              " != " + std::to_string(dim));
        total += s.length();
    }
    Mat out(total, dim);
    Index row = 0;
    for (const auto& s : seqs) {
        out.middleRows(row, s.length()) = s.frames.transpose();
        row += s.length();
    }
    return out;
}

} // namespace aword
