#pragma once

#include "degenmax/common.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace degenmax {

namespace detail {

inline void escape_into(std::string& out, const std::string& s) {
    out += '"';
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    out += '"';
}

inline void dump_into(std::string& out, const nlohmann::ordered_json& j, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad;
                escape_into(out, it.key());
                out += ": ";
                dump_into(out, it.value(), indent, depth + 1);
            }
            out += "\n" + close + "}";
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                out += pad;
                dump_into(out, j[i], indent, depth + 1);
            }
            out += "\n" + close + "]";
            return;
        }
        case nlohmann::json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? format_double(v) : "null";
            return;
        }
        case nlohmann::json::value_t::string:
            escape_into(out, j.get<std::string>());
            return;
        default:
            out += j.dump();
    }
}

}  // namespace detail

/// Serializes with every double printed to 17 significant digits; non-finite values become null.
inline std::string to_json_text(const nlohmann::ordered_json& j, int indent = 2) {
    std::string out;
    detail::dump_into(out, j, indent, 0);
    out += '\n';
    return out;
}

inline nlohmann::ordered_json to_json(const Vector& v) {
    auto arr = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

inline nlohmann::ordered_json to_json(const Matrix& m) {
    auto arr = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) arr.push_back(to_json(Vector(m.row(r).transpose())));
    return arr;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Config, "cannot write '" + path + "'");
    out << text;
}

/// Rows of doubles under a header line; doubles use 17 significant digits.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    void add(const std::vector<double>& row) {
        if (row.size() != header_.size()) fail(ErrorKind::Precondition, "CSV row width mismatch");
        rows_.push_back(row);
    }

    std::size_t rows() const { return rows_.size(); }

    std::string text() const {
        std::string out;
        for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
        out += '\n';
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out += ',';
                out += format_double(row[i]);
            }
            out += '\n';
        }
        return out;
    }

    void save(const std::string& path) const { write_text(path, text()); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

}  // namespace degenmax
