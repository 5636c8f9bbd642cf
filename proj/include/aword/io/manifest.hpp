#pragma once
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "aword/error.hpp"
#include "aword/features.hpp"
#include "aword/io/atomic_file.hpp"
#include "aword/io/blob.hpp"
#include "aword/types.hpp"

namespace aword {

// One manifest line per video. data_file is resolved relative to the
// manifest's directory; the payload at byte_offset is num_frames x dim
// float32, one frame per row.
struct ManifestEntry {
    std::string video_id;
    int label = 0;
    Index num_frames = 0;
    Index dim = 0;
    Stream stream = Stream::fused;
    std::string data_file;
    std::uint64_t byte_offset = 0;
};

inline void write_manifest(const std::filesystem::path& path,
                           const std::vector<ManifestEntry>& entries) {
    write_atomic(path, [&](std::ostream& out) {
        for (const auto& e : entries) {
            nlohmann::ordered_json j;
            j["video_id"] = e.video_id;
            j["label"] = e.label;
            j["num_frames"] = e.num_frames;
            j["dim"] = e.dim;
            j["stream"] = stream_name(e.stream);
            j["data_file"] = e.data_file;
            j["byte_offset"] = e.byte_offset;
            out << j.dump() << '\n';
        }
    });
}

inline std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::vector<ManifestEntry> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            ManifestEntry e;
            e.video_id = j.at("video_id").get<std::string>();
            e.label = j.at("label").get<int>();
            e.num_frames = j.at("num_frames").get<Index>();
            e.dim = j.at("dim").get<Index>();
            e.stream = stream_from_name(j.at("stream").get<std::string>());
            e.data_file = j.at("data_file").get<std::string>();
            e.byte_offset = j.at("byte_offset").get<std::uint64_t>();
            if (e.num_frames < 1 || e.dim < 1)
                throw DataError("manifest entry " + e.video_id + " has empty shape");
            entries.push_back(std::move(e));
        } catch (const nlohmann::json::exception& ex) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
        }
    }
    return entries;
}

inline std::filesystem::path resolve_data_file(const std::filesystem::path& manifest_path,
                                               const ManifestEntry& entry) {
    const std::filesystem::path data(entry.data_file);
    if (data.is_absolute()) return data;
    return manifest_path.parent_path() / data;
}

inline FeatureSequence load_sequence(const std::filesystem::path& manifest_path,
                                     const ManifestEntry& entry) {
    std::ifstream in = open_input(resolve_data_file(manifest_path, entry));
    in.seekg(static_cast<std::streamoff>(entry.byte_offset));
    if (!in) throw DataError("cannot seek to offset " + std::to_string(entry.byte_offset) + " in " +
                             entry.data_file);
    FeatureSequence seq;
    seq.video_id = entry.video_id;
    seq.label = entry.label;
    seq.stream = entry.stream;
    // Stored frame-major; in memory one frame per column.
    seq.frames = read_matrix_f32(in, entry.num_frames, entry.dim, entry.video_id).transpose();
    seq.validate();
    return seq;
}

inline std::vector<FeatureSequence> load_dataset(const std::filesystem::path& manifest_path) {
    std::vector<FeatureSequence> out;
    for (const auto& e : read_manifest(manifest_path)) out.push_back(load_sequence(manifest_path, e));
    return out;
}

// Writes all sequences into <name>.f32 plus a <name>.jsonl manifest next to
// it. Returns the manifest path.
inline std::filesystem::path write_dataset(const std::filesystem::path& dir, const std::string& name,
                                           const std::vector<FeatureSequence>& seqs) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string blob_name = name + ".f32";
    std::vector<ManifestEntry> entries;
    write_atomic(dir / blob_name, [&](std::ostream& out) {
        std::uint64_t offset = 0;
        for (const auto& s : seqs) {
            s.validate();
            ManifestEntry e;
            e.video_id = s.video_id;
            e.label = s.label;
            e.num_frames = s.length();
            e.dim = s.dim();
            e.stream = s.stream;
            e.data_file = blob_name;
            e.byte_offset = offset;
            entries.push_back(std::move(e));
            write_matrix_f32(out, s.frames.transpose());
            offset += static_cast<std::uint64_t>(s.frames.size()) * sizeof(float);
        }
    });
    const fs::path manifest = dir / (name + ".jsonl");
    write_manifest(manifest, entries);
    return manifest;
}

} // namespace aword
