#pragma once

#include "caddm/image.hpp"

namespace caddm {

// Prefix-sum table over a Plane: at(i, j) is the inclusive sum of
// m[0..i][0..j]. Any rectangle sum is four lookups. Stored with a zero
// guard row/column so lookups need no branching.
class SummedAreaTable {
 public:
  explicit SummedAreaTable(const Plane& m);

  int height() const { return height_; }
  int width() const { return width_; }

  // Inclusive prefix sum, the table entry itself.
  double at(int i, int j) const { return t_[idx(i + 1, j + 1)]; }

  // Sum over the half-open rectangle rows [y0, y1) x cols [x0, x1).
  double rect_sum(int y0, int x0, int y1, int x1) const {
    return t_[idx(y1, x1)] - t_[idx(y0, x1)] - t_[idx(y1, x0)] + t_[idx(y0, x0)];
  }

  // Sum over the h x w window whose top-left corner is (row y, col x).
  double window_sum(int y, int x, int h, int w) const {
    return rect_sum(y, x, y + h, x + w);
  }

 private:
  size_t idx(int i, int j) const { return static_cast<size_t>(i) * (width_ + 1) + j; }

  int height_ = 0;
  int width_ = 0;
  std::vector<double> t_;  // (H+1) x (W+1), first row/col zero
};

inline SummedAreaTable summed_area_table(const Plane& m) { return SummedAreaTable(m); }

}  // namespace caddm
