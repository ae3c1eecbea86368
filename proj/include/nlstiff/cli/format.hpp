#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace nlstiff::cli {

enum class OutputFormat { csv, text };

// Shortest string that parses back to the same double; integral values keep
// a trailing ".0".
std::string format_csv_number(double v);

// Six significant digits.
std::string format_text_number(double v);

using Cell = std::variant<double, long, bool, std::string>;

// Header plus rows, rendered either as CSV or as right-aligned text columns.
class Table {
public:
    explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<Cell> row);
    std::size_t rows() const noexcept { return rows_.size(); }
    void write(std::ostream& out, OutputFormat format) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
};

std::string format_cell(const Cell& cell, OutputFormat format);

}  // namespace nlstiff::cli
