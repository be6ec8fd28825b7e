#pragma once

#include <cstdio>
#include <string>

namespace semilab::core {

/// Round-trip decimal representation used by every artifact writer.
inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace semilab::core
