#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace proxipoint {

/// Shortest decimal string that round-trips to the same double. Used by the
/// expression printer, where parse(print(tree)) must rebuild the tree
/// bit-for-bit.
inline std::string format_shortest(double v) {
  if (v == 0.0) return "0";  // normalizes -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Fixed 17-significant-digit formatting for reports and traces.
inline std::string format_sig17(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf, buf + n);
}

}  // namespace proxipoint
