#include "mallows/report.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "mallows/errors.hpp"

namespace mallows {

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw ConfigError("unknown format '" + s + "' (expected csv or json)");
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string render_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(const BigInt& v) const { return v.str(); }
    std::string operator()(double v) const { return format_real(v); }
    std::string operator()(const std::string& v) const { return v; }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
  };
  return std::visit(Visitor{}, c);
}

namespace {

std::string csv_field(const Cell& c) {
  std::string s = render_cell(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

std::string json_value(const Cell& c) {
  if (std::holds_alternative<std::monostate>(c)) return "null";
  if (auto d = std::get_if<double>(&c)) return std::isfinite(*d) ? format_real(*d) : "null";
  if (auto s = std::get_if<std::string>(&c)) return nlohmann::json(*s).dump();
  return render_cell(c);
}

}  // namespace

void emit_series(const Table& table, Format format, std::ostream& out) {
  for (const auto& row : table.rows)
    if (row.size() != table.columns.size()) throw IoError("row width does not match schema");
  if (format == Format::Csv) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
      out << '\n';
    }
  } else {
    out << '[';
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      out << (r ? ",\n " : "\n ") << '{';
      for (std::size_t i = 0; i < table.columns.size(); ++i)
        out << (i ? ", " : "") << nlohmann::json(table.columns[i]).dump() << ": " << json_value(table.rows[r][i]);
      out << '}';
    }
    out << (table.rows.empty() ? "]\n" : "\n]\n");
  }
  if (!out) throw IoError("write failed");
}

}  // namespace mallows
