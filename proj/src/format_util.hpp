#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace relichoice::detail {

/// Shortest decimal form that parses back to exactly the same double.
inline std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

/// Readable 12-significant-digit form for diagnostics.
inline std::string human(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace relichoice::detail
