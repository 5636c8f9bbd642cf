#pragma once
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "aword/error.hpp"
#include "aword/io/atomic_file.hpp"
#include "aword/io/blob.hpp"
#include "aword/models/clstm.hpp"
#include "aword/models/tcnn.hpp"
#include "aword/nn/params.hpp"

namespace aword {

inline constexpr int kCheckpointFormatVersion = 1;

namespace detail {

inline nlohmann::ordered_json tcnn_config_json(const TcnnConfig& cfg) {
    nlohmann::ordered_json j;
    j["widths"] = cfg.widths;
    j["filters"] = cfg.filters;
    j["dropout_concat"] = cfg.dropout_concat;
    j["dropout_fc"] = cfg.dropout_fc;
    j["fc_hidden"] = cfg.fc_hidden;
    j["masked_pool"] = cfg.masked_pool;
    j["embedding_trainable"] = cfg.embedding_trainable;
    j["l_max"] = cfg.l_max;
    return j;
}

inline TcnnConfig tcnn_config_from_json(const nlohmann::json& j) {
    TcnnConfig cfg;
    cfg.widths = j.at("widths").get<std::vector<int>>();
    cfg.filters = j.at("filters").get<std::vector<int>>();
    cfg.dropout_concat = j.at("dropout_concat").get<double>();
    cfg.dropout_fc = j.at("dropout_fc").get<double>();
    cfg.fc_hidden = j.at("fc_hidden").get<int>();
    cfg.masked_pool = j.at("masked_pool").get<bool>();
    cfg.embedding_trainable = j.at("embedding_trainable").get<bool>();
    cfg.l_max = j.at("l_max").get<Index>();
    return cfg;
}

inline nlohmann::ordered_json clstm_config_json(const ClstmConfig& cfg) {
    nlohmann::ordered_json j;
    j["conv_width"] = cfg.conv_width;
    j["conv_filters"] = cfg.conv_filters;
    j["hidden"] = cfg.hidden;
    j["dropout"] = cfg.dropout;
    j["embedding_trainable"] = cfg.embedding_trainable;
    j["l_max"] = cfg.l_max;
    return j;
}

inline ClstmConfig clstm_config_from_json(const nlohmann::json& j) {
    ClstmConfig cfg;
    cfg.conv_width = j.at("conv_width").get<int>();
    cfg.conv_filters = j.at("conv_filters").get<int>();
    cfg.hidden = j.at("hidden").get<int>();
    cfg.dropout = j.at("dropout").get<double>();
    cfg.embedding_trainable = j.at("embedding_trainable").get<bool>();
    cfg.l_max = j.at("l_max").get<Index>();
    return cfg;
}

// Blocks are written in collect order, each in its span's own memory layout,
// so a load into a same-shaped model restores floats bit for bit.
template <typename T>
void write_param_blocks(std::ostream& out, ParamList<T>& spans) {
    for (auto& s : spans) {
        std::vector<float> buf(static_cast<std::size_t>(s.size()));
        for (Index i = 0; i < s.size(); ++i) buf[static_cast<std::size_t>(i)] = static_cast<float>(s.data[i]);
        write_f32(out, buf.data(), buf.size());
    }
}

template <typename T>
void read_param_blocks(std::istream& in, ParamList<T>& spans, const nlohmann::json& blocks,
                       const std::string& where) {
    if (blocks.size() != spans.size())
        throw DataError(where + ": expected " + std::to_string(spans.size()) + " blocks, header lists " +
                        std::to_string(blocks.size()));
    for (std::size_t i = 0; i < spans.size(); ++i) {
        auto& s = spans[i];
        const auto& b = blocks[i];
        if (b.at("name").get<std::string>() != s.name || b.at("rows").get<Index>() != s.rows ||
            b.at("cols").get<Index>() != s.cols)
            throw DataError(where + ": block " + std::to_string(i) + " mismatch for " + s.name);
        std::vector<float> buf(static_cast<std::size_t>(s.size()));
        read_f32(in, buf.data(), buf.size(), s.name);
        for (Index j = 0; j < s.size(); ++j) s.data[j] = static_cast<T>(buf[static_cast<std::size_t>(j)]);
    }
}

template <typename Model>
void save_checkpoint_impl(const std::filesystem::path& path, Model& model, const char* kind,
                          nlohmann::ordered_json cfg_json) {
    ParamList<typename Model::Scalar> spans;
    model.collect_params(spans);
    write_atomic(path, [&](std::ostream& out) {
        nlohmann::ordered_json j;
        j["model"] = kind;
        j["format_version"] = kCheckpointFormatVersion;
        j["classes"] = model.classes;
        j["vocab"] = model.vocab();
        j["dim"] = model.dim();
        j["config"] = std::move(cfg_json);
        nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
        for (const auto& s : spans) {
            nlohmann::ordered_json b;
            b["name"] = s.name;
            b["rows"] = s.rows;
            b["cols"] = s.cols;
            blocks.push_back(std::move(b));
        }
        j["blocks"] = std::move(blocks);
        out << j.dump() << '\n';
        write_param_blocks(out, spans);
    });
}

inline nlohmann::json read_checkpoint_header(std::istream& in, const std::filesystem::path& path,
                                             const char* expected_kind) {
    std::string header;
    if (!std::getline(in, header)) throw DataError("missing checkpoint header in " + path.string());
    try {
        auto j = nlohmann::json::parse(header);
        if (j.at("format_version").get<int>() != kCheckpointFormatVersion)
            throw DataError("unsupported checkpoint format_version in " + path.string());
        if (expected_kind && j.at("model").get<std::string>() != expected_kind)
            throw DataError(path.string() + " holds a " + j.at("model").get<std::string>() +
                            " model, expected " + expected_kind);
        return j;
    } catch (const nlohmann::json::exception& ex) {
        throw DataError(path.string() + ": bad checkpoint header: " + ex.what());
    }
}

} // namespace detail

inline std::string checkpoint_model_kind(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    return detail::read_checkpoint_header(in, path, nullptr).at("model").get<std::string>();
}

template <typename T>
void save_checkpoint(const std::filesystem::path& path, TcnnModel<T>& model) {
    detail::save_checkpoint_impl(path, model, "tcnn", detail::tcnn_config_json(model.cfg));
}

template <typename T>
void save_checkpoint(const std::filesystem::path& path, ClstmModel<T>& model) {
    detail::save_checkpoint_impl(path, model, "clstm", detail::clstm_config_json(model.cfg));
}

template <typename T = float>
TcnnModel<T> load_tcnn_checkpoint(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    const auto j = detail::read_checkpoint_header(in, path, "tcnn");
    const auto cfg = detail::tcnn_config_from_json(j.at("config"));
    EmbeddingTable table;
    table.rows = Mat::Zero(j.at("vocab").get<Index>(), j.at("dim").get<Index>());
    TcnnModel<T> model = build_tcnn<T>(j.at("classes").get<int>(), table, cfg, 0);
    ParamList<T> spans;
    model.collect_params(spans);
    detail::read_param_blocks(in, spans, j.at("blocks"), path.string());
    return model;
}

template <typename T = float>
ClstmModel<T> load_clstm_checkpoint(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    const auto j = detail::read_checkpoint_header(in, path, "clstm");
    const auto cfg = detail::clstm_config_from_json(j.at("config"));
    EmbeddingTable table;
    table.rows = Mat::Zero(j.at("vocab").get<Index>(), j.at("dim").get<Index>());
    ClstmModel<T> model = build_clstm<T>(j.at("classes").get<int>(), table, cfg, 0);
    ParamList<T> spans;
    model.collect_params(spans);
    detail::read_param_blocks(in, spans, j.at("blocks"), path.string());
    return model;
}

} // namespace aword
