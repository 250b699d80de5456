#pragma once

#include <array>
#include <vector>

#include "caddm/image.hpp"
#include "caddm/rng.hpp"

namespace caddm {

// Random crop, Gaussian blur, Gaussian noise, JPEG compression; each applied
// independently with probability p_apply. Parameter ranges are sampled
// uniformly per application.
struct AugmentConfig {
  bool enabled = true;
  std::array<double, 2> crop_fraction_range{0.85, 1.0};
  std::array<double, 2> blur_sigma_range{0.0, 2.0};
  std::array<double, 2> noise_sigma_range{0.0, 0.05};
  std::array<int, 2> jpeg_quality_range{40, 95};
  double p_apply = 0.5;
};

using PixelBoxes = std::vector<std::array<int, 4>>;

struct AugmentResult {
  Image image;
  PixelBoxes boxes;
};

// Applies crop -> blur -> noise -> JPEG in that order. The crop also crops
// and clips boxes, drops boxes whose surviving area falls under 25% of the
// original, and the image is resized back to its input size.
AugmentResult augment(const Image& img, const PixelBoxes& boxes,
                      const AugmentConfig& cfg, Rng& rng);

}  // namespace caddm
