#pragma once
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "aword/embedding.hpp"
#include "aword/error.hpp"
#include "aword/io/atomic_file.hpp"
#include "aword/io/blob.hpp"

namespace aword {

inline constexpr int kTableFormatVersion = 1;

// One JSON header line, then vocab x dim rows as row-major float32. Row 0 is
// the pad word and must be all zero.
inline void save_table(const std::filesystem::path& path, const EmbeddingTable& table) {
    write_atomic(path, [&](std::ostream& out) {
        nlohmann::ordered_json j;
        j["vocab"] = table.vocab_size();
        j["dim"] = table.dim();
        j["init_mode"] = init_mode_name(table.init_mode);
        j["format_version"] = kTableFormatVersion;
        out << j.dump() << '\n';
        write_matrix_f32(out, table.rows);
    });
}

inline EmbeddingTable load_table(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::string header;
    if (!std::getline(in, header)) throw DataError("missing table header in " + path.string());
    EmbeddingTable table;
    Index vocab = 0, dim = 0;
    try {
        const auto j = nlohmann::json::parse(header);
        if (j.at("format_version").get<int>() != kTableFormatVersion)
            throw DataError("unsupported table format_version in " + path.string());
        vocab = j.at("vocab").get<Index>();
        dim = j.at("dim").get<Index>();
        table.init_mode = init_mode_from_name(j.at("init_mode").get<std::string>());
    } catch (const nlohmann::json::exception& ex) {
        throw DataError(path.string() + ": bad table header: " + ex.what());
    }
    if (vocab < 1 || dim < 1) throw DataError(path.string() + ": table header has empty shape");
    table.rows = read_matrix_f32(in, vocab, dim, "embedding rows");
    if (table.rows.row(0).cwiseAbs().maxCoeff() != 0.0)
        throw DataError(path.string() + ": pad row 0 is not zero");
    return table;
}

} // namespace aword
