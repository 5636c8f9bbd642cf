#pragma once
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "aword/codebook.hpp"
#include "aword/error.hpp"
#include "aword/io/atomic_file.hpp"
#include "aword/io/blob.hpp"

namespace aword {

inline constexpr int kCodebookFormatVersion = 1;

// One JSON header line, then K x dim centroids as row-major float32.
inline void save_codebook(const std::filesystem::path& path, const Codebook& cb) {
    write_atomic(path, [&](std::ostream& out) {
        nlohmann::ordered_json j;
        j["K"] = cb.k();
        j["dim"] = cb.dim();
        j["seed"] = cb.seed;
        j["distortion"] = cb.distortion;
        j["format_version"] = kCodebookFormatVersion;
        out << j.dump() << '\n';
        write_matrix_f32(out, cb.centroids);
    });
}

inline Codebook load_codebook(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::string header;
    if (!std::getline(in, header)) throw DataError("missing codebook header in " + path.string());
    Codebook cb;
    Index k = 0, dim = 0;
    try {
        const auto j = nlohmann::json::parse(header);
        if (j.at("format_version").get<int>() != kCodebookFormatVersion)
            throw DataError("unsupported codebook format_version in " + path.string());
        k = j.at("K").get<Index>();
        dim = j.at("dim").get<Index>();
        cb.seed = j.at("seed").get<std::uint64_t>();
        cb.distortion = j.at("distortion").get<double>();
    } catch (const nlohmann::json::exception& ex) {
        throw DataError(path.string() + ": bad codebook header: " + ex.what());
    }
    if (k < 1 || dim < 1) throw DataError(path.string() + ": codebook header has empty shape");
    cb.centroids = read_matrix_f32(in, k, dim, "codebook centroids");
    return cb;
}

} // namespace aword
