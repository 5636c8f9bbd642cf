#pragma once
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "aword/embedding.hpp"
#include "aword/error.hpp"
#include "aword/io/atomic_file.hpp"

namespace aword {

// Encoded corpus: one {"video_id","label","ids"} object per line.
inline void save_encoded(const std::filesystem::path& path,
                         const std::vector<LabeledSequence>& seqs) {
    write_atomic(path, [&](std::ostream& out) {
        for (const auto& s : seqs) {
            nlohmann::ordered_json j;
            j["video_id"] = s.video_id;
            j["label"] = s.label;
            j["ids"] = s.words.ids;
            out << j.dump() << '\n';
        }
    });
}

inline std::vector<LabeledSequence> load_encoded(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::vector<LabeledSequence> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            LabeledSequence s;
            s.video_id = j.at("video_id").get<std::string>();
            s.label = j.at("label").get<int>();
            s.words.ids = j.at("ids").get<std::vector<int>>();
            if (s.words.ids.empty())
                throw DataError("encoded sequence " + s.video_id + " has no words");
            for (int id : s.words.ids)
                if (id < 0) throw DataError("encoded sequence " + s.video_id + " has negative word id");
            out.push_back(std::move(s));
        } catch (const nlohmann::json::exception& ex) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
        }
    }
    return out;
}

} // namespace aword
