#pragma once
#include <cassert>
#include <cstdint>
#include <string>

#include "aword/error.hpp"
#include "aword/types.hpp"

namespace aword {

using FlowGrid8 = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

// Per-frame average optical-flow magnitude from 8-bit flow images where 128
// encodes zero motion:  f = (sum|u-128| + sum|v-128|) / (2 P).
inline double flow_frame_average(const FlowGrid8& u, const FlowGrid8& v) {
    if (u.rows() != v.rows() || u.cols() != v.cols())
        throw ShapeMismatch("flow grids " + std::to_string(u.rows()) + "x" + std::to_string(u.cols()) +
                            " vs " + std::to_string(v.rows()) + "x" + std::to_string(v.cols()));
    const Index pixels = u.size();
    if (pixels < 1) throw ShapeMismatch("flow grid is empty");
    double su = 0.0, sv = 0.0;
    for (Index i = 0; i < pixels; ++i) {
        su += std::abs(static_cast<int>(u.data()[i]) - 128);
        sv += std::abs(static_cast<int>(v.data()[i]) - 128);
    }
    const double p = static_cast<double>(pixels);
    return 0.5 * (su / p + sv / p);
}

// Variant for flow already centered at zero (real-valued u, v).
inline double flow_frame_average(const Mat& u, const Mat& v) {
    if (u.rows() != v.rows() || u.cols() != v.cols())
        throw ShapeMismatch("flow grids differ in shape");
    if (u.size() < 1) throw ShapeMismatch("flow grid is empty");
    const double p = static_cast<double>(u.size());
    return 0.5 * (u.cwiseAbs().sum() / p + v.cwiseAbs().sum() / p);
}

// Corpus-wide flow magnitude statistics. mu_under is the mean over the frames
// at or below the overall mean; that subset is never empty when frames exist.
struct FlowStats {
    Vec per_frame_avg;
    double mu_all = 0.0;
    double mu_under = 0.0;

    static FlowStats from_averages(Vec averages) {
        if (averages.size() == 0) throw EmptyStats("no flow frames");
        FlowStats s;
        s.per_frame_avg = std::move(averages);
        s.mu_all = s.per_frame_avg.mean();
        double under_sum = 0.0;
        Index under_count = 0;
        for (Index i = 0; i < s.per_frame_avg.size(); ++i) {
            if (s.per_frame_avg[i] <= s.mu_all) {
                under_sum += s.per_frame_avg[i];
                ++under_count;
            }
        }
        assert(under_count > 0);
        s.mu_under = under_sum / static_cast<double>(under_count);
        return s;
    }
};

enum class RatioMode { mu_under, half_mu_under };

// Data ratio r = fraction of frames strictly above the threshold, where the
// threshold is mu_under or mu_under / 2.
inline double estimate_ratio(const FlowStats& stats, RatioMode mode) {
    const Index n = stats.per_frame_avg.size();
    if (n == 0) throw EmptyStats("no flow frames");
    const double threshold =
        mode == RatioMode::mu_under ? stats.mu_under : 0.5 * stats.mu_under;
    Index above = 0;
    for (Index i = 0; i < n; ++i)
        if (stats.per_frame_avg[i] > threshold) ++above;
    return static_cast<double>(above) / static_cast<double>(n);
}

} // namespace aword
