#include "caddm/integral.hpp"

namespace caddm {

SummedAreaTable::SummedAreaTable(const Plane& m)
    : height_(m.height),
      width_(m.width),
      t_(static_cast<size_t>(m.height + 1) * (m.width + 1), 0.0) {
  for (int y = 0; y < height_; ++y) {
    double row = 0.0;
    for (int x = 0; x < width_; ++x) {
      row += m.at(y, x);
      t_[idx(y + 1, x + 1)] = t_[idx(y, x + 1)] + row;
    }
  }
}

}  // namespace caddm
