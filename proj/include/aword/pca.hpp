#pragma once
#include <cmath>

#include "aword/error.hpp"
#include "aword/types.hpp"

namespace aword {

// Principal components of a training sample, used to cut feature vectors down
// before stream fusion. Rows of `components` are orthonormal and ordered by
// descending explained variance. Immutable after fit.
struct PcaModel {
    Vec mean;                // D
    Mat components;          // D' x D
    Vec explained_variance;  // D', non-increasing

    Index in_dim() const { return mean.size(); }
    Index out_dim() const { return components.rows(); }
};

// Covariance eigendecomposition on the training samples (rows of `samples`).
// No whitening. Component signs are fixed so that the largest-magnitude
// coordinate of each row is positive, which keeps fits reproducible.
inline PcaModel pca_fit(const Mat& samples, Index out_dim) {
    const Index n = samples.rows();
    const Index d = samples.cols();
    if (n < 2) throw InsufficientData("pca_fit needs at least 2 samples, got " + std::to_string(n));
    if (out_dim < 1 || out_dim > std::min(d, n))
        throw DimTooLarge("pca out_dim " + std::to_string(out_dim) + " exceeds min(dim, samples) = " +
                          std::to_string(std::min(d, n)));

    PcaModel model;
    model.mean = samples.colwise().mean();
    const Mat centered = samples.rowwise() - model.mean.transpose();
    const Mat cov = (centered.transpose() * centered) / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Mat> solver(cov);
    if (solver.info() != Eigen::Success)
        throw NumericError("pca eigendecomposition failed");

    // Eigen returns eigenvalues ascending; flip to descending.
    model.components.resize(out_dim, d);
    model.explained_variance.resize(out_dim);
    for (Index i = 0; i < out_dim; ++i) {
        const Index src = d - 1 - i;
        Vec comp = solver.eigenvectors().col(src);
        Index max_idx = 0;
        comp.cwiseAbs().maxCoeff(&max_idx);
        if (comp[max_idx] < 0) comp = -comp;
        model.components.row(i) = comp.transpose();
        model.explained_variance[i] = std::max(0.0, solver.eigenvalues()[src]);
    }
    return model;
}

inline Vec pca_project(const PcaModel& model, const Vec& x) {
    if (x.size() != model.in_dim())
        throw DimMismatch("pca_project: input dim " + std::to_string(x.size()) +
                          " != model dim " + std::to_string(model.in_dim()));
    return model.components * (x - model.mean);
}

inline Vec pca_reconstruct(const PcaModel& model, const Vec& projected) {
    if (projected.size() != model.out_dim())
        throw DimMismatch("pca_reconstruct: input dim " + std::to_string(projected.size()) +
                          " != model out_dim " + std::to_string(model.out_dim()));
    return model.components.transpose() * projected + model.mean;
}

} // namespace aword
