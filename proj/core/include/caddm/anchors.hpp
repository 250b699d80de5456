#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace caddm {

// Axis-aligned box, corner form, normalized image coordinates.
// x is the column axis, y the row axis; half-open on the pixel grid.
struct BoxXYXY {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  double w() const { return x1 - x0; }
  double h() const { return y1 - y0; }
  double cx() const { return 0.5 * (x0 + x1); }
  double cy() const { return 0.5 * (y0 + y1); }
  double area() const { return w() * h(); }
};

// Default box in center form plus its feature-map provenance.
struct Anchor {
  double cx = 0, cy = 0, w = 0, h = 0;
  int level = 0;    // index into the grid list
  int row = 0, col = 0;
  int variant = 0;  // index into the per-cell variant list

  BoxXYXY corners() const { return {cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2}; }
};

struct AnchorSet {
  std::vector<Anchor> boxes;
  std::vector<int> grids;             // grid size per level
  std::vector<int> variants_per_level;
  std::vector<size_t> level_offset;   // first anchor index of each level

  size_t size() const { return boxes.size(); }
};

// One box per (scale, ratio) pair per cell, centered at the cell center
// ((col+0.5)/grid, (row+0.5)/grid); w = s*sqrt(r), h = s/sqrt(r), corners
// clipped to [0,1]. scales[l] lists the box scales of level l; ratios are
// shared across levels.
AnchorSet build_anchors(const std::vector<int>& grids,
                        const std::vector<std::vector<double>>& scales,
                        const std::vector<double>& ratios);

// |a intersect b| / |a union b|. Throws on degenerate boxes.
double iou(const BoxXYXY& a, const BoxXYXY& b);

// Per-anchor match state against a ground-truth box list.
struct DetectionTargets {
  std::vector<uint8_t> match_indicator;          // x_ij, 1 iff positive
  std::vector<int> matched_gt;                   // gt index for positives, -1 otherwise
  std::vector<std::array<double, 4>> offsets;    // encoded (cx, cy, w, h); positives only
  int n_positives = 0;
};

// Positive iff max IoU over gt exceeds iou_threshold (strictly); positives
// regress toward their argmax gt. Empty gt leaves every anchor negative.
DetectionTargets match_anchors(const AnchorSet& anchors,
                               const std::vector<BoxXYXY>& gt_boxes,
                               double iou_threshold = 0.9);

// (g - d) center offsets scaled by anchor size, log size ratios.
std::array<double, 4> encode_offsets(const BoxXYXY& gt, const Anchor& anchor);
BoxXYXY decode_offsets(const Anchor& anchor, const std::array<double, 4>& offsets);

// Greedy descending-score suppression; returns kept indices in score order.
std::vector<size_t> nms(const std::vector<BoxXYXY>& boxes,
                        const std::vector<double>& scores, double iou_threshold = 0.5);

}  // namespace caddm
