#include "caddm/mfs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "caddm/blend.hpp"
#include "caddm/dssim.hpp"
#include "caddm/integral.hpp"

namespace caddm {

SlidingWindow select_window(const DssimMap& d, int h, int w) {
  if (h <= 0 || w <= 0 || h > d.height || w > d.width)
    throw std::invalid_argument("select_window: window larger than image");
  const SummedAreaTable sat(d);
  SlidingWindow best{0, 0, h, w};
  double best_sum = -1.0;
  for (int y = 0; y + h <= d.height; ++y) {
    for (int x = 0; x + w <= d.width; ++x) {
      const double s = sat.window_sum(y, x, h, w);
      if (s > best_sum) {
        best_sum = s;
        best.x = x;
        best.y = y;
      }
    }
  }
  return best;
}

namespace {

bool all_zero(const DssimMap& d) {
  for (double v : d.values)
    if (v != 0.0) return false;
  return true;
}

std::array<int, 4> support_bbox(const Mask& m) {
  int x0 = m.width, y0 = m.height, x1 = 0, y1 = 0;
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x)
      if (m.at(y, x) > 0.0) {
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x + 1);
        y1 = std::max(y1, y + 1);
      }
  return {x0, y0, x1, y1};
}

}  // namespace

MfsOutcome partial_swap(const Image& fake, const Image& source, int lo, int hi,
                        Rng& rng, const MfsConfig& cfg) {
  require_same_shape(fake, source, "partial_swap");
  if (lo <= 0 || hi < lo) throw std::invalid_argument("partial_swap: bad scale bucket");

  const int h = static_cast<int>(rng.uniform_int(lo, std::min(hi, fake.height)));
  const int w = static_cast<int>(rng.uniform_int(lo, std::min(hi, fake.width)));
  if (h >= fake.height && w >= fake.width) return global_swap(fake, source, rng, cfg);

  const DssimMap d = dssim_map(fake, source);
  if (all_zero(d)) {
    MfsOutcome out;
    out.image = source;
    out.ann.fake = false;
    return out;
  }

  const SlidingWindow win = select_window(d, h, w);
  Mask mask(fake.height, fake.width, 0.0);
  for (int y = win.y; y < win.y + win.h; ++y)
    for (int x = win.x; x < win.x + win.w; ++x) mask.at(y, x) = 1.0;

  MfsOutcome out;
  out.blend = rng.bernoulli(cfg.p_poisson) ? BlendKind::poisson : BlendKind::alpha;
  if (out.blend == BlendKind::poisson) {
    const bool touches_border = win.x == 0 || win.y == 0 ||
                                win.x + win.w == fake.width ||
                                win.y + win.h == fake.height;
    if (touches_border) {
      // Gradient-domain blending needs interior boundary pixels.
      out.blend = BlendKind::alpha;
      out.poisson_fallback = true;
    }
  }
  out.image = out.blend == BlendKind::poisson ? poisson_blend(fake, source, mask)
                                              : alpha_blend(fake, source, mask);
  out.ann.fake = true;
  out.ann.artifact_boxes.push_back({win.x, win.y, win.x + win.w, win.y + win.h});
  return out;
}

MfsOutcome global_swap(const Image& fake, const Image& source, Rng& rng,
                       const MfsConfig& cfg) {
  require_same_shape(fake, source, "global_swap");
  const int h = fake.height, w = fake.width;

  const double ax = rng.uniform(cfg.global_axis_lo, cfg.global_axis_hi) * w / 2.0;
  const double ay = rng.uniform(cfg.global_axis_lo, cfg.global_axis_hi) * h / 2.0;
  const double sigma = rng.uniform(cfg.global_sigma_lo, cfg.global_sigma_hi);

  const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
  Mask mask(h, w, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double dx = (x - cx) / ax, dy = (y - cy) / ay;
      if (dx * dx + dy * dy <= 1.0) mask.at(y, x) = 1.0;
    }
  mask = gaussian_blur(mask, sigma);

  MfsOutcome out;
  out.global = true;
  out.image = alpha_blend(fake, source, mask);
  out.ann.fake = true;
  out.ann.artifact_boxes.push_back(support_bbox(mask));
  return out;
}

MfsOutcome mfs_sample(const Image& fake, const Image& source, const MfsConfig& cfg,
                      Rng& rng) {
  if (cfg.scale_buckets.empty()) throw std::invalid_argument("mfs_sample: no scale buckets");
  if (rng.bernoulli(cfg.p_global)) return global_swap(fake, source, rng, cfg);
  const int bucket =
      static_cast<int>(rng.uniform_int(0, static_cast<int64_t>(cfg.scale_buckets.size()) - 1));
  MfsOutcome out = partial_swap(fake, source, cfg.scale_buckets[static_cast<size_t>(bucket)][0],
                                cfg.scale_buckets[static_cast<size_t>(bucket)][1], rng, cfg);
  out.bucket = bucket;
  return out;
}

}  // namespace caddm
