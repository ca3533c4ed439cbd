#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace vfrl {

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// Strict double parse; throws ParseError(source, line) on garbage.
double parse_double(std::string_view text, const std::string& source, std::size_t line);

std::vector<std::string> split_csv_line(std::string_view line);

std::string_view trim(std::string_view s);

// Header-checked CSV table. Columns are looked up by name; extra columns are
// rejected unless listed as optional.
class CsvTable {
 public:
  static CsvTable read(std::istream& in, const std::string& source,
                       const std::vector<std::string>& required,
                       const std::vector<std::string>& optional = {});
  static CsvTable read_file(const std::string& path, const std::vector<std::string>& required,
                            const std::vector<std::string>& optional = {});

  std::size_t rows() const { return cells_.size(); }
  bool has_column(const std::string& name) const;
  const std::string& cell(std::size_t row, const std::string& column) const;
  double number(std::size_t row, const std::string& column) const;
  // 1-based line number in the source file for a data row.
  std::size_t line_of(std::size_t row) const { return lines_[row]; }
  const std::string& source() const { return source_; }

 private:
  std::size_t column_index(const std::string& name) const;

  std::string source_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> cells_;
  std::vector<std::size_t> lines_;
};

}  // namespace vfrl
