#pragma once
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <system_error>

#include "aword/error.hpp"

namespace aword {

// Writes through a sibling temp file and renames into place, so readers never
// observe a half-written file and a failed write leaves the old file intact.
inline void write_atomic(const std::filesystem::path& path,
                         const std::function<void(std::ostream&)>& writer) {
    namespace fs = std::filesystem;
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        try {
            writer(out);
        } catch (...) {
            out.close();
            std::error_code ignored;
            fs::remove(tmp, ignored);
            throw;
        }
        out.flush();
        if (!out) {
            out.close();
            std::error_code ignored;
            fs::remove(tmp, ignored);
            throw IoError("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignored;
        fs::remove(tmp, ignored);
        throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    return in;
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (!in && !in.eof()) throw IoError("read failed for " + path.string());
    return buf.str();
}

} // namespace aword
