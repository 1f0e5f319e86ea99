#include "qst/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace qst {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

TableFormat parse_table_format(const std::string& name) {
  if (name == "csv") return TableFormat::csv;
  if (name == "jsonl") return TableFormat::jsonl;
  throw std::invalid_argument("unknown output format '" + name + "' (expected csv or jsonl)");
}

namespace {

std::string csv_cell(const Cell& cell) {
  struct {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(double x) const { return format_number(x); }
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string quoted = "\"";
      for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
      }
      return quoted + '"';
    }
  } visitor;
  return std::visit(visitor, cell);
}

// Keys keep header order; numbers go through format_number so the output
// matches the CSV digits exactly.
std::string json_line(const std::vector<std::string>& header, const std::vector<Cell>& row) {
  std::string out = "{";
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += nlohmann::json(header[i]).dump();
    out += ':';
    const Cell& cell = i < row.size() ? row[i] : Cell{};
    if (std::holds_alternative<std::monostate>(cell)) {
      out += "null";
    } else if (auto d = std::get_if<double>(&cell)) {
      out += std::isfinite(*d) ? format_number(*d) : "null";
    } else if (auto n = std::get_if<std::int64_t>(&cell)) {
      out += std::to_string(*n);
    } else {
      out += nlohmann::json(std::get<std::string>(cell)).dump();
    }
  }
  return out + "}";
}

}  // namespace

void write_table(std::ostream& os, const Table& table, TableFormat format) {
  if (format == TableFormat::csv) {
    for (const auto& c : table.comments) os << "# " << c << '\n';
    for (std::size_t i = 0; i < table.header.size(); ++i) os << (i ? "," : "") << table.header[i];
    os << '\n';
    for (const auto& row : table.rows) {
      if (row.size() != table.header.size())
        throw std::invalid_argument("write_table: row width does not match header");
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
      os << '\n';
    }
  } else {
    for (const auto& row : table.rows) {
      if (row.size() != table.header.size())
        throw std::invalid_argument("write_table: row width does not match header");
      os << json_line(table.header, row) << '\n';
    }
  }
}

void write_table(const std::string& destination, const Table& table, TableFormat format) {
  if (destination.empty() || destination == "-") {
    write_table(std::cout, table, format);
    std::cout.flush();
    return;
  }
  std::ofstream out(destination, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + destination + "' for writing");
  write_table(out, table, format);
  out.flush();
  if (!out) throw std::runtime_error("write to '" + destination + "' failed");
}

}  // namespace qst
