#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "mallows/pattern_count.hpp"

namespace mallows {

using Cell = std::variant<std::monostate, std::int64_t, BigInt, double, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

enum class Format { Csv, Json };

Format parse_format(const std::string& s);
// Reals use 17 significant digits; integers are exact.
std::string format_real(double x);
std::string render_cell(const Cell& c);
void emit_series(const Table& table, Format format, std::ostream& out);

}  // namespace mallows
