#pragma once

// File formats of the command-line tool: headerless numeric CSV (rows are
// observations), integer label files and JSON documents.

#include "waveclust/error.hpp"
#include "waveclust/matrix.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace waveclust::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// Bad or unreadable input files (exit code 2).
class InputError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view field, const std::string& where) {
    const auto text = trim(field);
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end) {
        throw InputError(where + ": '" + std::string(text) + "' is not a number");
    }
    if (!std::isfinite(value)) throw InputError(where + ": non-finite value");
    return value;
}

inline std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Lines of a text file with blank lines dropped. `skip` leading lines are
// discarded first (a header).
inline std::vector<std::pair<std::size_t, std::string>> data_lines(const std::string& text, int skip) {
    std::vector<std::pair<std::size_t, std::string>> out;
    std::istringstream in(text);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (static_cast<int>(number) <= skip) continue;
        if (trim(line).empty()) continue;
        out.emplace_back(number, line);
    }
    return out;
}

}  // namespace detail

// Rectangular numeric CSV, comma separated.
inline Matrix read_csv_matrix(const fs::path& path, bool header = false) {
    const auto lines = detail::data_lines(detail::read_text(path), header ? 1 : 0);
    if (lines.empty()) throw InputError(path.string() + ": no data rows");
    std::vector<std::vector<double>> rows;
    for (const auto& [number, line] : lines) {
        std::vector<double> row;
        std::string_view rest = line;
        const std::string where = path.string() + ":" + std::to_string(number);
        while (true) {
            const auto comma = rest.find(',');
            row.push_back(detail::parse_double(rest.substr(0, comma), where));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw InputError(where + ": expected " + std::to_string(rows.front().size()) + " columns, got " +
                             std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

// Integer labels, one per line or all on one comma-separated line.
inline Labels read_labels(const fs::path& path, bool header = false) {
    const Matrix m = read_csv_matrix(path, header);
    if (m.rows() != 1 && m.cols() != 1) throw InputError(path.string() + ": labels must be a single row or column");
    Labels out;
    for (Eigen::Index k = 0; k < m.size(); ++k) {
        const double v = m.data()[k];
        if (v != std::floor(v) || std::abs(v) > 1e9) throw InputError(path.string() + ": labels must be integers");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_csv_matrix(const fs::path& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    std::string line;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        line.clear();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) line += ',';
            line += format_double(m(i, j));
        }
        line += '\n';
        out << line;
    }
    if (!out) throw Error("failed writing " + path.string());
}

inline void write_labels(const fs::path& path, const Labels& labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    for (int l : labels) out << l << '\n';
    if (!out) throw Error("failed writing " + path.string());
}

inline void write_json(const fs::path& path, const Json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw Error("failed writing " + path.string());
}

inline Json read_json(const fs::path& path) {
    const std::string text = detail::read_text(path);
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

inline Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const Json& j, const std::string& what) {
    if (!j.is_array() || j.empty() || !j.front().is_array()) throw InputError(what + ": expected a nonempty matrix");
    const auto cols = j.front().size();
    Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array() || j[i].size() != cols) throw InputError(what + ": ragged matrix");
        for (std::size_t k = 0; k < cols; ++k) {
            if (!j[i][k].is_number()) throw InputError(what + ": non-numeric entry");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
        }
    }
    return m;
}

}  // namespace waveclust::cli
