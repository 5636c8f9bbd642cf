#pragma once
#include <Eigen/Dense>

namespace aword {

using Index = Eigen::Index;

// Feature-space math (PCA, codebooks, encodings) runs in double; files store
// 32-bit floats and conversion happens at the I/O boundary.
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Network kernels are templated so training runs in float and the gradient
// checks run the identical code paths in double.
template <typename T>
using VecT = Eigen::Vector<T, Eigen::Dynamic>;
template <typename T>
using MatT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

using VecF = VecT<float>;
using MatF = MatT<float>;

} // namespace aword
