#include "nlstiff/cli/format.hpp"

#include "nlstiff/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace nlstiff::cli {

std::string format_csv_number(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, end);
    if (std::isfinite(v) && s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

std::string format_text_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string format_cell(const Cell& cell, OutputFormat format) {
    return std::visit(
        [format](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                return format == OutputFormat::csv ? format_csv_number(v) : format_text_number(v);
            } else if constexpr (std::is_same_v<T, long>) {
                return std::to_string(v);
            } else if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else {
                return v;
            }
        },
        cell);
}

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != header_.size()) throw DimensionError("table row", header_.size(), row.size());
    rows_.push_back(std::move(row));
}

void Table::write(std::ostream& out, OutputFormat format) const {
    std::vector<std::vector<std::string>> cells;
    cells.reserve(rows_.size());
    for (const auto& row : rows_) {
        std::vector<std::string> r;
        r.reserve(row.size());
        for (const auto& c : row) r.push_back(format_cell(c, format));
        cells.push_back(std::move(r));
    }

    if (format == OutputFormat::csv) {
        const auto line = [&out](const std::vector<std::string>& r) {
            for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
            out << '\n';
        };
        line(header_);
        for (const auto& r : cells) line(r);
        return;
    }

    std::vector<std::size_t> width(header_.size());
    for (std::size_t i = 0; i < header_.size(); ++i) width[i] = header_[i].size();
    for (const auto& r : cells) {
        for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    }
    const auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out << "  ";
            out << std::string(width[i] - r[i].size(), ' ') << r[i];
        }
        out << '\n';
    };
    line(header_);
    for (const auto& r : cells) line(r);
}

}  // namespace nlstiff::cli
