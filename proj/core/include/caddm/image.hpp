#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace caddm {

// Single-channel H x W map of doubles. Carrier for masks, structural
// dissimilarity maps and luminance planes.
struct Plane {
  int height = 0;
  int width = 0;
  std::vector<double> values;

  Plane() = default;
  Plane(int h, int w, double fill = 0.0)
      : height(h), width(w), values(static_cast<size_t>(h) * static_cast<size_t>(w), fill) {}

  double& at(int y, int x) { return values[static_cast<size_t>(y) * width + x]; }
  double at(int y, int x) const { return values[static_cast<size_t>(y) * width + x]; }
  size_t size() const { return values.size(); }
  bool same_shape(const Plane& o) const { return height == o.height && width == o.width; }
};

// Blending weights in [0,1].
using Mask = Plane;
// Per-pixel structural dissimilarity in [0,1].
using DssimMap = Plane;

// Dense 3-channel raster, interleaved RGB, values in [0,1].
struct Image {
  int height = 0;
  int width = 0;
  std::vector<double> data;

  Image() = default;
  Image(int h, int w, double fill = 0.0)
      : height(h), width(w), data(static_cast<size_t>(h) * static_cast<size_t>(w) * 3, fill) {}

  double& at(int y, int x, int c) {
    return data[(static_cast<size_t>(y) * width + x) * 3 + c];
  }
  double at(int y, int x, int c) const {
    return data[(static_cast<size_t>(y) * width + x) * 3 + c];
  }
  size_t size() const { return data.size(); }
  bool same_shape(const Image& o) const { return height == o.height && width == o.width; }
};

// Throws std::invalid_argument on shape mismatch.
void require_same_shape(const Image& a, const Image& b, const char* what);
void require_same_shape(const Image& a, const Plane& b, const char* what);

void clamp01(Image& img);

// Mean of the three channels.
Plane luminance(const Image& img);

// Gaussian filtering with reflected borders (edge pixel not duplicated).
// radius < 0 picks ceil(3*sigma). sigma <= 0 returns the input unchanged.
std::vector<double> gaussian_kernel(double sigma, int radius);
Plane gaussian_blur(const Plane& src, double sigma, int radius = -1);
Image gaussian_blur(const Image& src, double sigma, int radius = -1);

Image resize_bilinear(const Image& src, int out_h, int out_w);

// Axis-aligned rectangle stroke, pixel corners half-open, clipped to bounds.
void draw_box(Image& img, int x0, int y0, int x1, int y1,
              const std::array<double, 3>& color, int thickness = 2);

}  // namespace caddm
