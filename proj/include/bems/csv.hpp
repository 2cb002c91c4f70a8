#pragma once

// Minimal CSV plumbing: comma-separated, no quoting (no field ever contains
// a comma), numbers in shortest round-trip form.

#include <charconv>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "bems/errors.hpp"

namespace bems::csv {

inline std::string format(double x) {
  if (x == 0.0) return "0";  // folds -0
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

inline double parse_double(std::string_view s, std::string_view what, long row) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || s.empty())
    throw DataError("row " + std::to_string(row) + ": bad " + std::string(what) + " value '" + std::string(s) + "'");
  return v;
}

inline long parse_long(std::string_view s, std::string_view what, long row) {
  long v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || s.empty())
    throw DataError("row " + std::to_string(row) + ": bad " + std::string(what) + " value '" + std::string(s) + "'");
  return v;
}

inline void expect_header(std::istream& in, const std::vector<std::string>& expected) {
  std::string line;
  if (!read_line(in, line)) throw DataError("row 1: missing header");
  if (split(line) != expected) throw DataError("row 1: header does not match the expected schema");
}

inline void write_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << fields[i];
  }
  os << '\n';
}

}  // namespace bems::csv
