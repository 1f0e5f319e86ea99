#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qst {

// Shortest decimal string that parses back to the same double.
std::string format_number(double x);

// Empty cells (monostate) are written as an empty CSV field and as JSON null.
using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

inline Cell optional_cell(const std::optional<double>& v) {
  return v ? Cell{*v} : Cell{};
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
  // Written as "# ..." lines ahead of a CSV header; omitted from JSON lines.
  std::vector<std::string> comments;
};

enum class TableFormat { csv, jsonl };

TableFormat parse_table_format(const std::string& name);

void write_table(std::ostream& os, const Table& table, TableFormat format);

// destination "-" or empty means standard output. Throws std::runtime_error
// naming the path on I/O failure.
void write_table(const std::string& destination, const Table& table, TableFormat format);

}  // namespace qst
