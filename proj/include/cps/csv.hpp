#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace cps {

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

// Column-oriented CSV accumulator. Rows are buffered and written in one
// shot so an aborted run never leaves a truncated file behind.
class CsvTable {
 public:
  using Cell = std::variant<std::int64_t, double, std::string>;

  explicit CsvTable(std::vector<std::string> columns);

  void add_row(std::vector<Cell> cells);
  std::size_t row_count() const { return rows_.size(); }
  std::size_t column_count() const { return columns_.size(); }

  std::string to_string() const;
  void save(const std::string& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

}  // namespace cps
