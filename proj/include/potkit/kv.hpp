#pragma once

// Flat `key = value` documents: parsing helpers and a deterministic writer.

#include "potkit/errors.hpp"
#include "potkit/geom.hpp"

#include <fmt/format.h>

#include <charconv>
#include <concepts>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

namespace potkit {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

/// Locale-independent decimal parse of the whole string.
inline double parse_real(std::string_view text, std::string_view what) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end)
    throw Error(ErrorKind::ParseError, fmt::format("{}: '{}' is not a number", what, text));
  return value;
}

inline long long parse_integer(std::string_view text, std::string_view what) {
  text = trim(text);
  long long value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end)
    throw Error(ErrorKind::ParseError, fmt::format("{}: '{}' is not an integer", what, text));
  return value;
}

inline std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

/// "re,im" -> complex point.
inline ComplexPoint parse_complex(std::string_view text, std::string_view what) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw Error(ErrorKind::ParseError, fmt::format("{}: expected re,im but got '{}'", what, text));
  return {parse_real(parts[0], what), parse_real(parts[1], what)};
}

/// "x0,y0; x1,y1; ..." -> list of points.
inline std::vector<ComplexPoint> parse_point_list(std::string_view text, std::string_view what) {
  std::vector<ComplexPoint> points;
  for (auto item : split(text, ';')) {
    if (item.empty()) continue;
    points.push_back(parse_complex(item, what));
  }
  return points;
}

/// Shortest representation that round-trips a double exactly.
inline std::string format_real(double v) { return fmt::format("{}", v); }

/// Parses `key = value` lines; '#' starts a comment, blank lines are skipped.
/// Duplicate keys are rejected.
inline std::map<std::string, std::string, std::less<>> parse_kv(std::string_view text) {
  std::map<std::string, std::string, std::less<>> out;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::ParseError, fmt::format("line {}: expected 'key = value'", line_no));
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw Error(ErrorKind::ParseError, fmt::format("line {}: empty key", line_no));
    if (!out.emplace(key, value).second)
      throw Error(ErrorKind::ParseError, fmt::format("line {}: duplicate key '{}'", line_no, key));
  }
  return out;
}

/// Ordered `key = value` writer.
class KvWriter {
 public:
  KvWriter& comment(std::string_view text) {
    out_ << "# " << text << '\n';
    return *this;
  }
  KvWriter& add(std::string_view key, std::string_view value) {
    out_ << key << " = " << value << '\n';
    return *this;
  }
  KvWriter& add(std::string_view key, const char* value) { return add(key, std::string_view(value)); }
  KvWriter& add(std::string_view key, const std::string& value) { return add(key, std::string_view(value)); }
  KvWriter& add(std::string_view key, double value) { return add(key, format_real(value)); }
  KvWriter& add(std::string_view key, bool value) { return add(key, value ? "true" : "false"); }
  template <std::integral T>
    requires(!std::same_as<T, bool>)
  KvWriter& add(std::string_view key, T value) {
    return add(key, std::to_string(value));
  }
  KvWriter& add(std::string_view key, const ComplexPoint& z) {
    if (z.is_infinity()) return add(key, "inf");
    return add(key, format_real(z.re()) + "," + format_real(z.im()));
  }

  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

}  // namespace potkit
