#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>

namespace fasa {

inline std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

// Canonical form used when matching configured column names against headers:
// trimmed, underscores treated as spaces. Stored names keep their original
// (trimmed) spelling.
inline std::string canon_name(std::string_view s) {
  std::string t = trim(s);
  for (char& c : t)
    if (c == '_') c = ' ';
  return t;
}

// Shortest decimal form that parses back to the identical double. Keeps
// serialized artifacts byte-stable across runs.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

// Fixed-point seconds used in trace lines and timeline output.
inline std::string format_time(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", t);
  return std::string(buf);
}

}  // namespace fasa
