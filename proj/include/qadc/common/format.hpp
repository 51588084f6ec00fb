#pragma once

#include <cstdio>
#include <string>

namespace qadc {

/// Decimal float with 12 significant digits, the format of every CSV we emit.
inline std::string fmt12(double v) {
  if (v == 0.0) return "0";  // avoid "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace qadc
