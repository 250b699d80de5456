#include "caddm/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace caddm {

void require_same_shape(const Image& a, const Image& b, const char* what) {
  if (!a.same_shape(b))
    throw std::invalid_argument(std::string(what) + ": image shapes differ (" +
                                std::to_string(a.height) + "x" + std::to_string(a.width) +
                                " vs " + std::to_string(b.height) + "x" +
                                std::to_string(b.width) + ")");
}

void require_same_shape(const Image& a, const Plane& b, const char* what) {
  if (a.height != b.height || a.width != b.width)
    throw std::invalid_argument(std::string(what) + ": mask shape differs (" +
                                std::to_string(a.height) + "x" + std::to_string(a.width) +
                                " vs " + std::to_string(b.height) + "x" +
                                std::to_string(b.width) + ")");
}

void clamp01(Image& img) {
  for (double& v : img.data) v = std::clamp(v, 0.0, 1.0);
}

Plane luminance(const Image& img) {
  Plane out(img.height, img.width);
  const double* p = img.data.data();
  for (size_t i = 0; i < out.size(); ++i, p += 3) out.values[i] = (p[0] + p[1] + p[2]) / 3.0;
  return out;
}

std::vector<double> gaussian_kernel(double sigma, int radius) {
  std::vector<double> k(static_cast<size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    k[static_cast<size_t>(i + radius)] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

namespace {

// Reflect-101 index: ... 2 1 | 0 1 2 ... n-1 | n-2 n-3 ...
inline int mirror(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

// Separable 1-D pass along x for a generic row-major buffer with `stride`
// doubles between horizontally adjacent samples.
void blur_pass(const double* src, double* dst, int count, int stride, int n,
               const std::vector<double>& k, int radius) {
  for (int c = 0; c < count; ++c) {
    const double* s = src + static_cast<size_t>(c) * stride * n;
    double* d = dst + static_cast<size_t>(c) * stride * n;
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int t = -radius; t <= radius; ++t)
        acc += k[static_cast<size_t>(t + radius)] * s[static_cast<size_t>(mirror(i + t, n)) * stride];
      d[static_cast<size_t>(i) * stride] = acc;
    }
  }
}

}  // namespace

Plane gaussian_blur(const Plane& src, double sigma, int radius) {
  if (sigma <= 0.0) return src;
  if (radius < 0) radius = static_cast<int>(std::ceil(3.0 * sigma));
  const auto k = gaussian_kernel(sigma, radius);
  Plane tmp(src.height, src.width), out(src.height, src.width);
  // Horizontal pass: rows are contiguous.
  blur_pass(src.values.data(), tmp.values.data(), src.height, 1, src.width, k, radius);
  // Vertical pass per column.
  for (int x = 0; x < src.width; ++x) {
    for (int y = 0; y < src.height; ++y) {
      double acc = 0.0;
      for (int t = -radius; t <= radius; ++t)
        acc += k[static_cast<size_t>(t + radius)] * tmp.at(mirror(y + t, src.height), x);
      out.at(y, x) = acc;
    }
  }
  return out;
}

Image gaussian_blur(const Image& src, double sigma, int radius) {
  if (sigma <= 0.0) return src;
  if (radius < 0) radius = static_cast<int>(std::ceil(3.0 * sigma));
  const auto k = gaussian_kernel(sigma, radius);
  Image tmp(src.height, src.width), out(src.height, src.width);
  // Horizontal then vertical, per channel.
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      double acc[3] = {0, 0, 0};
      for (int t = -radius; t <= radius; ++t) {
        int xx = mirror(x + t, src.width);
        double w = k[static_cast<size_t>(t + radius)];
        for (int c = 0; c < 3; ++c) acc[c] += w * src.at(y, xx, c);
      }
      for (int c = 0; c < 3; ++c) tmp.at(y, x, c) = acc[c];
    }
  }
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      double acc[3] = {0, 0, 0};
      for (int t = -radius; t <= radius; ++t) {
        int yy = mirror(y + t, src.height);
        double w = k[static_cast<size_t>(t + radius)];
        for (int c = 0; c < 3; ++c) acc[c] += w * tmp.at(yy, x, c);
      }
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = acc[c];
    }
  }
  return out;
}

Image resize_bilinear(const Image& src, int out_h, int out_w) {
  if (out_h <= 0 || out_w <= 0) throw std::invalid_argument("resize_bilinear: bad output size");
  if (out_h == src.height && out_w == src.width) return src;
  Image out(out_h, out_w);
  const double sy = static_cast<double>(src.height) / out_h;
  const double sx = static_cast<double>(src.width) / out_w;
  for (int y = 0; y < out_h; ++y) {
    double fy = (y + 0.5) * sy - 0.5;
    int y0 = static_cast<int>(std::floor(fy));
    double wy = fy - y0;
    int y0c = std::clamp(y0, 0, src.height - 1);
    int y1c = std::clamp(y0 + 1, 0, src.height - 1);
    for (int x = 0; x < out_w; ++x) {
      double fx = (x + 0.5) * sx - 0.5;
      int x0 = static_cast<int>(std::floor(fx));
      double wx = fx - x0;
      int x0c = std::clamp(x0, 0, src.width - 1);
      int x1c = std::clamp(x0 + 1, 0, src.width - 1);
      for (int c = 0; c < 3; ++c) {
        double top = src.at(y0c, x0c, c) * (1 - wx) + src.at(y0c, x1c, c) * wx;
        double bot = src.at(y1c, x0c, c) * (1 - wx) + src.at(y1c, x1c, c) * wx;
        out.at(y, x, c) = top * (1 - wy) + bot * wy;
      }
    }
  }
  return out;
}

void draw_box(Image& img, int x0, int y0, int x1, int y1,
              const std::array<double, 3>& color, int thickness) {
  auto put = [&](int y, int x) {
    if (y < 0 || y >= img.height || x < 0 || x >= img.width) return;
    for (int c = 0; c < 3; ++c) img.at(y, x, c) = color[static_cast<size_t>(c)];
  };
  for (int t = 0; t < thickness; ++t) {
    for (int x = x0; x < x1; ++x) {
      put(y0 + t, x);
      put(y1 - 1 - t, x);
    }
    for (int y = y0; y < y1; ++y) {
      put(y, x0 + t);
      put(y, x1 - 1 - t);
    }
  }
}

}  // namespace caddm
