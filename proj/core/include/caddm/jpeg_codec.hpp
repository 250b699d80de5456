#pragma once

#include <cstdint>
#include <vector>

#include "caddm/image.hpp"

namespace caddm {

// In-memory JPEG round trip used by the compression augmentation.
// quality follows the usual 1..100 quantization scale.
std::vector<uint8_t> jpeg_encode(const Image& img, int quality);
Image jpeg_decode(const std::vector<uint8_t>& bytes);

inline Image jpeg_roundtrip(const Image& img, int quality) {
  return jpeg_decode(jpeg_encode(img, quality));
}

}  // namespace caddm
