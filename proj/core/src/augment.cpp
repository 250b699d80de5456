#include "caddm/augment.hpp"

#include <algorithm>
#include <cmath>

#include "caddm/jpeg_codec.hpp"

namespace caddm {

AugmentResult augment(const Image& img, const PixelBoxes& boxes,
                      const AugmentConfig& cfg, Rng& rng) {
  AugmentResult r{img, boxes};
  if (!cfg.enabled) return r;
  const int H = img.height, W = img.width;

  if (rng.bernoulli(cfg.p_apply)) {
    const double f = rng.uniform(cfg.crop_fraction_range[0], cfg.crop_fraction_range[1]);
    const int ch = std::clamp(static_cast<int>(std::lround(f * H)), 1, H);
    const int cw = std::clamp(static_cast<int>(std::lround(f * W)), 1, W);
    const int y0 = static_cast<int>(rng.uniform_int(0, H - ch));
    const int x0 = static_cast<int>(rng.uniform_int(0, W - cw));
    if (ch != H || cw != W || y0 != 0 || x0 != 0) {
      Image crop(ch, cw);
      for (int y = 0; y < ch; ++y)
        for (int x = 0; x < cw; ++x)
          for (int c = 0; c < 3; ++c) crop.at(y, x, c) = img.at(y0 + y, x0 + x, c);
      r.image = resize_bilinear(crop, H, W);

      const double sx = static_cast<double>(W) / cw, sy = static_cast<double>(H) / ch;
      PixelBoxes kept;
      for (const auto& b : r.boxes) {
        const double orig_area = static_cast<double>(b[2] - b[0]) * (b[3] - b[1]);
        const int ix0 = std::max(b[0], x0), iy0 = std::max(b[1], y0);
        const int ix1 = std::min(b[2], x0 + cw), iy1 = std::min(b[3], y0 + ch);
        if (ix1 <= ix0 || iy1 <= iy0) continue;
        const double new_area = static_cast<double>(ix1 - ix0) * (iy1 - iy0);
        if (new_area < 0.25 * orig_area) continue;
        const int ox0 = std::clamp(static_cast<int>(std::lround((ix0 - x0) * sx)), 0, W);
        const int oy0 = std::clamp(static_cast<int>(std::lround((iy0 - y0) * sy)), 0, H);
        const int ox1 = std::clamp(static_cast<int>(std::lround((ix1 - x0) * sx)), 0, W);
        const int oy1 = std::clamp(static_cast<int>(std::lround((iy1 - y0) * sy)), 0, H);
        if (ox1 > ox0 && oy1 > oy0) kept.push_back({ox0, oy0, ox1, oy1});
      }
      r.boxes = std::move(kept);
    }
  }

  if (rng.bernoulli(cfg.p_apply)) {
    const double sigma = rng.uniform(cfg.blur_sigma_range[0], cfg.blur_sigma_range[1]);
    if (sigma > 1e-9) r.image = gaussian_blur(r.image, sigma);
  }

  if (rng.bernoulli(cfg.p_apply)) {
    const double sigma = rng.uniform(cfg.noise_sigma_range[0], cfg.noise_sigma_range[1]);
    if (sigma > 0.0)
      for (double& v : r.image.data) v += rng.normal(0.0, sigma);
  }

  if (rng.bernoulli(cfg.p_apply)) {
    const int q = static_cast<int>(
        rng.uniform_int(cfg.jpeg_quality_range[0], cfg.jpeg_quality_range[1]));
    r.image = jpeg_roundtrip(r.image, q);
  }

  clamp01(r.image);
  return r;
}

}  // namespace caddm
