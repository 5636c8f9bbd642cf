#pragma once
#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "aword/io/atomic_file.hpp"
#include "aword/io/flow_io.hpp"
#include "aword/models/train.hpp"

namespace aword {

using ReportValue = std::variant<std::int64_t, double, std::string>;

// Flat section/key/value metrics, kept in insertion order so serialized
// output is reproducible byte for byte.
struct Report {
    struct Row {
        std::string section, key;
        ReportValue value;
    };
    std::vector<Row> rows;

    void put(const std::string& section, const std::string& key, double v) {
        rows.push_back({section, key, v});
    }
    void put(const std::string& section, const std::string& key, std::int64_t v) {
        rows.push_back({section, key, v});
    }
    void put(const std::string& section, const std::string& key, int v) {
        rows.push_back({section, key, static_cast<std::int64_t>(v)});
    }
    void put(const std::string& section, const std::string& key, std::uint64_t v) {
        rows.push_back({section, key, static_cast<std::int64_t>(v)});
    }
    void put(const std::string& section, const std::string& key, const std::string& v) {
        rows.push_back({section, key, v});
    }
    void put(const std::string& section, const std::string& key, const char* v) {
        rows.push_back({section, key, std::string(v)});
    }
};

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

inline std::string report_value_text(const ReportValue& v) {
    if (std::holds_alternative<std::int64_t>(v)) return std::to_string(std::get<std::int64_t>(v));
    if (std::holds_alternative<double>(v)) return format_g17(std::get<double>(v));
    return std::get<std::string>(v);
}

} // namespace detail

// {section: {key: value}}; sections and keys keep insertion order.
inline void save_report_json(const std::filesystem::path& path, const Report& report) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& row : report.rows) {
        auto& section = j[row.section];
        if (std::holds_alternative<std::int64_t>(row.value))
            section[row.key] = std::get<std::int64_t>(row.value);
        else if (std::holds_alternative<double>(row.value))
            section[row.key] = std::get<double>(row.value);
        else
            section[row.key] = std::get<std::string>(row.value);
    }
    write_atomic(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

// section,key,value rows; an empty report still gets the header line.
inline void save_report_csv(const std::filesystem::path& path, const Report& report) {
    write_atomic(path, [&](std::ostream& out) {
        out << "section,key,value\n";
        for (const auto& row : report.rows)
            out << detail::csv_field(row.section) << ',' << detail::csv_field(row.key) << ','
                << detail::csv_field(detail::report_value_text(row.value)) << '\n';
    });
}

inline void save_history_csv(const std::filesystem::path& path,
                             const std::vector<EpochStats>& history) {
    write_atomic(path, [&](std::ostream& out) {
        out << "epoch,train_loss,train_acc,val_acc\n";
        for (const auto& e : history)
            out << e.epoch << ',' << format_g17(e.train_loss) << ',' << format_g17(e.train_acc) << ','
                << format_g17(e.val_acc) << '\n';
    });
}

} // namespace aword
