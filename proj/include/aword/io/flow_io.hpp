#pragma once
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "aword/error.hpp"
#include "aword/io/atomic_file.hpp"

namespace aword {

inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Per-frame flow magnitudes, one value per line.
inline void save_flow_averages(const std::filesystem::path& path, const std::vector<double>& avgs) {
    write_atomic(path, [&](std::ostream& out) {
        for (double v : avgs) out << format_g17(v) << '\n';
    });
}

inline std::vector<double> load_flow_averages(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::vector<double> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            std::size_t used = 0;
            const double v = std::stod(line, &used);
            if (used != line.size()) throw std::invalid_argument("trailing characters");
            out.push_back(v);
        } catch (const std::exception&) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": not a number: " + line);
        }
    }
    return out;
}

} // namespace aword
