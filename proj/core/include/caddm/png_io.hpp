#pragma once

#include <string>

#include "caddm/image.hpp"

namespace caddm {

// Lossless 8-bit RGB file boundary. Values are mapped [0,1] <-> [0,255]
// with round-half-up on write and division by 255 on read.
Image read_png(const std::string& path);
void write_png(const std::string& path, const Image& img);

inline uint8_t to_byte(double v) {
  double s = v * 255.0 + 0.5;
  if (s <= 0.0) return 0;
  if (s >= 255.0) return 255;
  return static_cast<uint8_t>(s);
}

inline double from_byte(uint8_t b) { return b / 255.0; }

}  // namespace caddm
