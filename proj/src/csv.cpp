#include "stratoctl/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "stratoctl/error.hpp"

namespace stratoctl {

std::string format_number(double v, int precision) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, precision);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<CsvColumn> columns, int precision)
    : columns_(std::move(columns)), precision_(precision) {}

CsvTable& CsvTable::cell(double v) { return cell(std::string_view(format_number(v, precision_))); }

CsvTable& CsvTable::cell(long long v) { return cell(std::string_view(std::to_string(v))); }

CsvTable& CsvTable::cell(std::string_view text) {
  if (in_row_ > 0) body_ += ',';
  body_.append(text);
  ++in_row_;
  return *this;
}

void CsvTable::end_row() {
  if (in_row_ != columns_.size()) {
    throw InvalidArgument("csv row has " + std::to_string(in_row_) + " cells, expected " +
                          std::to_string(columns_.size()));
  }
  body_ += '\n';
  in_row_ = 0;
  ++rows_;
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ',';
    out += columns_[i].name + "[" + columns_[i].unit + "]";
  }
  out += '\n';
  return out + body_;
}

void CsvTable::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  const std::string s = str();
  f.write(s.data(), static_cast<std::streamsize>(s.size()));
  if (!f) throw ConfigError("write failed for '" + path + "'");
}

}  // namespace stratoctl
