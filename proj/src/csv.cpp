#include "cps/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace cps {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw std::invalid_argument("CsvTable: empty header");
}

void CsvTable::add_row(std::vector<Cell> cells) {
  if (cells.size() != columns_.size())
    throw std::invalid_argument("CsvTable: row width does not match header");
  rows_.push_back(std::move(cells));
}

namespace {
void append_cell(std::string& out, const CsvTable::Cell& cell) {
  if (std::holds_alternative<std::int64_t>(cell)) {
    out += std::to_string(std::get<std::int64_t>(cell));
  } else if (std::holds_alternative<double>(cell)) {
    out += format_double(std::get<double>(cell));
  } else {
    out += std::get<std::string>(cell);
  }
}
}  // namespace

std::string CsvTable::to_string() const {
  std::string out;
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (c) out += ',';
    out += columns_[c];
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      append_cell(out, row[c]);
    }
    out += '\n';
  }
  return out;
}

void CsvTable::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  const std::string body = to_string();
  f.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace cps
