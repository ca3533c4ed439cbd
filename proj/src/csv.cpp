#include "vfrl/csv.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>

#include "vfrl/error.hpp"

namespace vfrl {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), ptr);
}

std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r' && c != '\n'; };
  auto begin = std::find_if(s.begin(), s.end(), not_space);
  auto end = std::find_if(s.rbegin(), s.rend(), not_space).base();
  if (begin >= end) return {};
  return std::string_view(&*begin, static_cast<std::size_t>(end - begin));
}

double parse_double(std::string_view text, const std::string& source, std::size_t line) {
  const std::string_view t = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ParseError(source, line, "not a number: '" + std::string(t) + "'");
  }
  return value;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::string_view field =
        line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.emplace_back(trim(field));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

CsvTable CsvTable::read(std::istream& in, const std::string& source,
                        const std::vector<std::string>& required,
                        const std::vector<std::string>& optional) {
  CsvTable table;
  table.source_ = source;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = split_csv_line(t);
    if (!have_header) {
      for (const auto& col : required) {
        if (std::find(fields.begin(), fields.end(), col) == fields.end()) {
          throw ParseError(source, line_no, "missing column '" + col + "'");
        }
      }
      for (const auto& col : fields) {
        const bool known = std::find(required.begin(), required.end(), col) != required.end() ||
                           std::find(optional.begin(), optional.end(), col) != optional.end();
        if (!known) throw ParseError(source, line_no, "unexpected column '" + col + "'");
      }
      table.header_ = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header_.size()) {
      throw ParseError(source, line_no,
                       "expected " + std::to_string(table.header_.size()) + " fields, got " +
                           std::to_string(fields.size()));
    }
    table.cells_.push_back(std::move(fields));
    table.lines_.push_back(line_no);
  }
  if (!have_header) throw ParseError(source, line_no, "empty file (no header)");
  return table;
}

CsvTable CsvTable::read_file(const std::string& path, const std::vector<std::string>& required,
                             const std::vector<std::string>& optional) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read(in, path, required, optional);
}

bool CsvTable::has_column(const std::string& name) const {
  return std::find(header_.begin(), header_.end(), name) != header_.end();
}

std::size_t CsvTable::column_index(const std::string& name) const {
  auto it = std::find(header_.begin(), header_.end(), name);
  if (it == header_.end()) throw Error(source_ + ": no column '" + name + "'");
  return static_cast<std::size_t>(it - header_.begin());
}

const std::string& CsvTable::cell(std::size_t row, const std::string& column) const {
  return cells_.at(row).at(column_index(column));
}

double CsvTable::number(std::size_t row, const std::string& column) const {
  return parse_double(cell(row, column), source_, lines_.at(row));
}

}  // namespace vfrl
