#pragma once

#include <charconv>
#include <string>

namespace pzf {

// Shortest decimal form that round-trips to the same double.
inline std::string format_shortest(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;  // 32 bytes always suffice for shortest form
  return std::string(buf, end);
}

}  // namespace pzf
