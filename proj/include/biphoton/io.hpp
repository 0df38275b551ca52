#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "biphoton/errors.hpp"

namespace biphoton {

/// One sample of a fringe scan: path difference and a rate or count value.
struct CurvePoint {
  double delta_l_nm = 0.0;
  double value = 0.0;
};

namespace io {

/// Shortest decimal form that round-trips the exact double.
inline std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline bool try_parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline double parse_double_or_throw(std::string_view s, std::size_t line, const char* field) {
  double x;
  if (!try_parse_double(s, x))
    throw parse_error(std::string("cannot parse ") + field + " from '" + std::string(trim(s)) + "'",
                      line);
  return x;
}

inline bool try_parse_u64(std::string_view s, std::uint64_t& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline std::vector<std::string_view> split_fields(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == sep) {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

inline bool is_comment_or_blank(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

}  // namespace io

/// Reads a two-or-more-column numeric CSV into curve points, taking columns
/// `x_col` and `y_col`. `#` comments are skipped and a single leading header
/// row is tolerated. Malformed data rows raise parse_error with the line number.
inline std::vector<CurvePoint> load_curve_csv(std::istream& in, std::size_t x_col = 0,
                                              std::size_t y_col = 1) {
  std::vector<CurvePoint> points;
  std::string line;
  std::size_t lineno = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (io::is_comment_or_blank(line)) continue;
    const auto fields = io::split_fields(line);
    const std::size_t need = std::max(x_col, y_col) + 1;
    double x, y;
    if (fields.size() < need) throw parse_error("expected at least " + std::to_string(need) + " columns", lineno);
    if (!io::try_parse_double(fields[x_col], x) || !io::try_parse_double(fields[y_col], y)) {
      if (!seen_data) continue;  // header row
      throw parse_error("cannot parse numeric fields", lineno);
    }
    points.push_back({x, y});
    seen_data = true;
  }
  return points;
}

}  // namespace biphoton
