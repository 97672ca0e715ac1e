#include "qkdtopo/common.hpp"

#include <cstdio>

namespace qkdtopo {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace qkdtopo
