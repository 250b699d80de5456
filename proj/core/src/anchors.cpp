#include "caddm/anchors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace caddm {

AnchorSet build_anchors(const std::vector<int>& grids,
                        const std::vector<std::vector<double>>& scales,
                        const std::vector<double>& ratios) {
  if (grids.size() != scales.size())
    throw std::invalid_argument("build_anchors: one scale list per level required");
  for (int g : grids)
    if (g <= 0) throw std::invalid_argument("build_anchors: grid sizes must be positive");

  AnchorSet set;
  set.grids = grids;
  for (size_t l = 0; l < grids.size(); ++l) {
    set.level_offset.push_back(set.boxes.size());
    const int g = grids[l];
    const int variants = static_cast<int>(scales[l].size() * ratios.size());
    set.variants_per_level.push_back(variants);
    for (int row = 0; row < g; ++row) {
      for (int col = 0; col < g; ++col) {
        const double cx = (col + 0.5) / g;
        const double cy = (row + 0.5) / g;
        int variant = 0;
        for (double s : scales[l]) {
          for (double r : ratios) {
            const double sr = std::sqrt(r);
            const double w = s * sr, h = s / sr;
            // Clip corners into the image, then store back in center form.
            const double x0 = std::clamp(cx - w / 2, 0.0, 1.0);
            const double x1 = std::clamp(cx + w / 2, 0.0, 1.0);
            const double y0 = std::clamp(cy - h / 2, 0.0, 1.0);
            const double y1 = std::clamp(cy + h / 2, 0.0, 1.0);
            Anchor a;
            a.cx = 0.5 * (x0 + x1);
            a.cy = 0.5 * (y0 + y1);
            a.w = x1 - x0;
            a.h = y1 - y0;
            a.level = static_cast<int>(l);
            a.row = row;
            a.col = col;
            a.variant = variant++;
            set.boxes.push_back(a);
          }
        }
      }
    }
  }
  return set;
}

double iou(const BoxXYXY& a, const BoxXYXY& b) {
  if (a.x1 <= a.x0 || a.y1 <= a.y0 || b.x1 <= b.x0 || b.y1 <= b.y0)
    throw std::invalid_argument("iou: degenerate box");
  const double ix = std::max(0.0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
  const double iy = std::max(0.0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
  const double inter = ix * iy;
  return inter / (a.area() + b.area() - inter);
}

DetectionTargets match_anchors(const AnchorSet& anchors,
                               const std::vector<BoxXYXY>& gt_boxes,
                               double iou_threshold) {
  DetectionTargets t;
  const size_t n = anchors.size();
  t.match_indicator.assign(n, 0);
  t.matched_gt.assign(n, -1);
  t.offsets.assign(n, {0, 0, 0, 0});
  for (size_t i = 0; i < n; ++i) {
    const BoxXYXY a = anchors.boxes[i].corners();
    double best = 0.0;
    int best_j = -1;
    for (size_t j = 0; j < gt_boxes.size(); ++j) {
      const double v = iou(a, gt_boxes[j]);
      if (v > best) {
        best = v;
        best_j = static_cast<int>(j);
      }
    }
    if (best_j >= 0 && best > iou_threshold) {
      t.match_indicator[i] = 1;
      t.matched_gt[i] = best_j;
      t.offsets[i] = encode_offsets(gt_boxes[static_cast<size_t>(best_j)], anchors.boxes[i]);
      ++t.n_positives;
    }
  }
  return t;
}

std::array<double, 4> encode_offsets(const BoxXYXY& gt, const Anchor& d) {
  return {(gt.cx() - d.cx) / d.w, (gt.cy() - d.cy) / d.h,
          std::log(gt.w() / d.w), std::log(gt.h() / d.h)};
}

BoxXYXY decode_offsets(const Anchor& d, const std::array<double, 4>& o) {
  const double cx = d.cx + o[0] * d.w;
  const double cy = d.cy + o[1] * d.h;
  const double w = d.w * std::exp(o[2]);
  const double h = d.h * std::exp(o[3]);
  return {cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2};
}

std::vector<size_t> nms(const std::vector<BoxXYXY>& boxes,
                        const std::vector<double>& scores, double iou_threshold) {
  if (boxes.size() != scores.size())
    throw std::invalid_argument("nms: boxes and scores must have equal length");
  std::vector<size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  std::vector<size_t> kept;
  std::vector<char> removed(boxes.size(), 0);
  for (size_t oi = 0; oi < order.size(); ++oi) {
    const size_t i = order[oi];
    if (removed[i]) continue;
    kept.push_back(i);
    for (size_t oj = oi + 1; oj < order.size(); ++oj) {
      const size_t j = order[oj];
      if (!removed[j] && iou(boxes[i], boxes[j]) > iou_threshold) removed[j] = 1;
    }
  }
  return kept;
}

}  // namespace caddm
