#pragma once

// Locale-independent number formatting and CSV output.

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dispersim/error.hpp"

namespace dispersim {

// Fixed notation with 12 decimals for magnitudes in [1e-3, 1e9), scientific
// with 12 significant digits otherwise; exact zero (either sign) prints as
// 0.000000000000.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;
  char buf[64];
  const double a = std::abs(v);
  std::to_chars_result r;
  if (a == 0.0 || (a >= 1e-3 && a < 1e9))
    r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 12);
  else
    r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 11);
  return std::string(buf, r.ptr);
}

// Shortest representation that round-trips; used in file names.
inline std::string shortest_number(double v) {
  if (v == 0.0) v = 0.0;
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct CsvColumn {
  std::string name;
  std::vector<double> values;
};

// Header row first, LF line endings.
inline void write_csv(std::ostream& os, const std::vector<CsvColumn>& cols) {
  if (cols.empty()) return;
  const std::size_t n = cols.front().values.size();
  for (const auto& c : cols)
    if (c.values.size() != n) throw ParameterError("write_csv: ragged columns");
  for (std::size_t j = 0; j < cols.size(); ++j)
    os << (j ? "," : "") << cols[j].name;
  os << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j)
      os << (j ? "," : "") << format_number(cols[j].values[i]);
    os << '\n';
  }
}

}  // namespace dispersim
