#pragma once

// Comma-separated tables with a `name[unit]` header row and LF line endings.
// Numbers are formatted with std::to_chars, so output never depends on the
// process locale.

#include <string>
#include <string_view>
#include <vector>

namespace stratoctl {

struct CsvColumn {
  std::string name;
  std::string unit;  // "1" for dimensionless
};

// Shortest-of-%g style formatting with `precision` significant digits.
std::string format_number(double v, int precision);

class CsvTable {
 public:
  CsvTable(std::vector<CsvColumn> columns, int precision);

  CsvTable& cell(double v);
  CsvTable& cell(long long v);
  CsvTable& cell(std::string_view text);
  void end_row();  // throws InvalidArgument if the row width is wrong

  std::string str() const;
  // Throws ConfigError if the file cannot be created.
  void write(const std::string& path) const;

  std::size_t rows() const { return rows_; }

 private:
  std::vector<CsvColumn> columns_;
  int precision_;
  std::string body_;
  std::size_t in_row_ = 0;
  std::size_t rows_ = 0;
};

}  // namespace stratoctl
