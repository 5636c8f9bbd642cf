#pragma once
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "aword/error.hpp"
#include "aword/types.hpp"

// Binary payloads are raw little-endian float32. The build targets
// little-endian hosts only; byte swapping is out of scope.
static_assert(std::endian::native == std::endian::little,
              "float32 blobs are little-endian; big-endian hosts are unsupported");

namespace aword {

inline void write_f32(std::ostream& out, const float* data, std::size_t count) {
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(float)));
}

inline void read_f32(std::istream& in, float* data, std::size_t count, const std::string& what) {
    in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(float))
        throw DataError("truncated float32 block while reading " + what);
}

// Row-major buffer of a matrix, regardless of Eigen's storage order.
template <typename T>
std::vector<float> to_f32_rowmajor(const MatT<T>& m) {
    std::vector<float> buf(static_cast<std::size_t>(m.size()));
    std::size_t at = 0;
    for (Index r = 0; r < m.rows(); ++r)
        for (Index c = 0; c < m.cols(); ++c) buf[at++] = static_cast<float>(m(r, c));
    return buf;
}

template <typename T>
MatT<T> from_f32_rowmajor(const std::vector<float>& buf, Index rows, Index cols) {
    if (buf.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
        throw DataError("float32 buffer holds " + std::to_string(buf.size()) + " values, expected " +
                        std::to_string(rows * cols));
    MatT<T> m(rows, cols);
    std::size_t at = 0;
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) m(r, c) = static_cast<T>(buf[at++]);
    return m;
}

inline void write_matrix_f32(std::ostream& out, const Mat& m) {
    const auto buf = to_f32_rowmajor(m);
    write_f32(out, buf.data(), buf.size());
}

inline Mat read_matrix_f32(std::istream& in, Index rows, Index cols, const std::string& what) {
    std::vector<float> buf(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    read_f32(in, buf.data(), buf.size(), what);
    return from_f32_rowmajor<double>(buf, rows, cols);
}

} // namespace aword
