#pragma once

#include <charconv>
#include <string>

namespace transnn {

/// Shortest round-trip decimal form; deterministic across runs and
/// platforms, unlike ostream defaults. Infinities print as "inf".
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace transnn
