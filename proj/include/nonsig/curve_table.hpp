#pragma once
// Column tables emitted by the figure commands: CSV with '#' metadata lines,
// shortest round-trip number formatting, and a minimal SVG line plot.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nonsig/errors.hpp"

namespace nonsig {

struct CurveTable {
    std::vector<std::string> column_names;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> metadata;

    std::size_t column_index(std::string_view name) const {
        const auto it = std::find(column_names.begin(), column_names.end(), name);
        if (it == column_names.end()) {
            throw PreconditionError("CurveTable: no column '" + std::string(name) + "'");
        }
        return static_cast<std::size_t>(it - column_names.begin());
    }

    std::vector<double> column(std::string_view name) const {
        const std::size_t j = column_index(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& row : rows) out.push_back(row[j]);
        return out;
    }

    std::string meta(std::string_view key) const {
        for (const auto& [k, v] : metadata) {
            if (k == key) return v;
        }
        throw PreconditionError("CurveTable: no metadata key '" + std::string(key) + "'");
    }

    void add_meta(std::string key, std::string value) {
        metadata.emplace_back(std::move(key), std::move(value));
    }

    /// Row widths match the header and the first column strictly increases.
    void validate() const {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != column_names.size()) {
                throw PreconditionError("CurveTable: row " + std::to_string(i) +
                                        " has the wrong number of columns");
            }
            if (i > 0 && !(rows[i][0] > rows[i - 1][0])) {
                throw PreconditionError("CurveTable: grid column is not strictly increasing");
            }
        }
    }
};

/// Shortest decimal string that parses back to exactly `x`.
inline std::string format_real(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline double parse_real(std::string_view text) {
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        // from_chars does not accept "inf"/"nan" spellings from every producer.
        if (text == "inf") return INFINITY;
        if (text == "-inf") return -INFINITY;
        throw PreconditionError("parse_real: not a number: '" + std::string(text) + "'");
    }
    return value;
}

namespace detail {

inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

}  // namespace detail

/// "# key=value" metadata lines, a header row, then one row per grid point.
inline void write_csv(const CurveTable& table, std::ostream& os) {
    table.validate();
    for (const auto& [key, value] : table.metadata) os << "# " << key << '=' << value << '\n';
    for (std::size_t j = 0; j < table.column_names.size(); ++j) {
        os << (j ? "," : "") << detail::csv_field(table.column_names[j]);
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << format_real(row[j]);
        os << '\n';
    }
}

inline std::string to_csv(const CurveTable& table) {
    std::ostringstream os;
    write_csv(table, os);
    return os.str();
}

inline CurveTable read_csv(std::istream& is) {
    CurveTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!have_header && line.rfind("# ", 0) == 0) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw PreconditionError("read_csv: bad metadata line");
            table.add_meta(line.substr(2, eq - 2), line.substr(eq + 1));
            continue;
        }
        if (!have_header) {
            table.column_names = detail::split_csv_line(line);
            have_header = true;
            continue;
        }
        if (line.empty()) continue;
        std::vector<double> row;
        for (const auto& field : detail::split_csv_line(line)) row.push_back(parse_real(field));
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw PreconditionError("read_csv: missing header");
    table.validate();
    return table;
}

inline CurveTable parse_csv(const std::string& text) {
    std::istringstream is(text);
    return read_csv(is);
}

/// Line plot of every column against the first. No computation of its own.
inline void write_svg(const CurveTable& table, std::ostream& os, int width = 800,
                      int height = 500) {
    table.validate();
    if (table.rows.empty() || table.column_names.size() < 2) {
        throw PreconditionError("write_svg: need at least one row and two columns");
    }
    constexpr double margin = 50.0;
    double x_lo = table.rows.front()[0];
    double x_hi = table.rows.back()[0];
    double y_lo = 0.0;
    double y_hi = 0.0;
    for (const auto& row : table.rows) {
        for (std::size_t j = 1; j < row.size(); ++j) {
            if (std::isfinite(row[j])) {
                y_lo = std::min(y_lo, row[j]);
                y_hi = std::max(y_hi, row[j]);
            }
        }
    }
    if (y_hi == y_lo) y_hi = y_lo + 1.0;
    if (x_hi == x_lo) x_hi = x_lo + 1.0;
    auto px = [&](double x) { return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin); };
    auto py = [&](double y) {
        return height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2 * margin);
    };
    static constexpr const char* palette[] = {"#000000", "#d62728", "#1f77b4", "#2ca02c",
                                              "#9467bd", "#ff7f0e", "#8c564b", "#e377c2"};

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<line x1=\"" << margin << "\" y1=\"" << py(y_lo) << "\" x2=\"" << width - margin
       << "\" y2=\"" << py(y_lo) << "\" stroke=\"#888\"/>\n";
    for (std::size_t j = 1; j < table.column_names.size(); ++j) {
        os << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << palette[(j - 1) % 8]
           << "\" points=\"";
        for (const auto& row : table.rows) {
            if (std::isfinite(row[j])) os << px(row[0]) << ',' << py(row[j]) << ' ';
        }
        os << "\"/>\n";
        os << "<text x=\"" << width - margin - 160 << "\" y=\"" << margin + 16.0 * j
           << "\" font-size=\"12\" fill=\"" << palette[(j - 1) % 8] << "\">"
           << table.column_names[j] << "</text>\n";
    }
    os << "<text x=\"" << margin << "\" y=\"" << height - 15 << "\" font-size=\"12\">"
       << table.column_names[0] << " [" << format_real(x_lo) << ", " << format_real(x_hi)
       << "]</text>\n";
    os << "</svg>\n";
}

}  // namespace nonsig
