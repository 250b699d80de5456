#include "caddm/blend.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace caddm {

Image alpha_blend(const Image& fake, const Image& source, const Mask& mask) {
  require_same_shape(fake, source, "alpha_blend");
  require_same_shape(fake, mask, "alpha_blend");
  Image out(fake.height, fake.width);
  for (size_t i = 0; i < mask.size(); ++i) {
    const double m = mask.values[i];
    for (size_t c = 0; c < 3; ++c)
      out.data[i * 3 + c] = fake.data[i * 3 + c] * m + source.data[i * 3 + c] * (1.0 - m);
  }
  return out;
}

namespace {

constexpr int kDy[4] = {-1, 1, 0, 0};
constexpr int kDx[4] = {0, 0, -1, 1};

}  // namespace

Image poisson_blend(const Image& fake, const Image& source, const Mask& mask,
                    PoissonStats* stats, double tol, int max_iters) {
  require_same_shape(fake, source, "poisson_blend");
  require_same_shape(fake, mask, "poisson_blend");

  const int h = fake.height, w = fake.width;
  std::vector<int> index(mask.size(), -1);
  std::vector<int> cells;  // flat pixel index per unknown
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double m = mask.at(y, x);
      if (m != 0.0 && m != 1.0)
        throw std::invalid_argument("poisson_blend: mask must be binary");
      if (m == 1.0) {
        if (y == 0 || y == h - 1 || x == 0 || x == w - 1)
          throw std::invalid_argument("poisson_blend: mask touches the image border");
        index[static_cast<size_t>(y) * w + x] = static_cast<int>(cells.size());
        cells.push_back(y * w + x);
      }
    }
  }

  Image out = source;
  const size_t n = cells.size();
  if (n == 0) {
    if (stats) *stats = {0, 0.0};
    return out;
  }

  // Precompute the 4-neighbour structure once; shared across channels.
  std::vector<std::array<int, 4>> nbr(n);  // unknown index or -1
  std::vector<std::array<int, 4>> nbr_pix(n);
  for (size_t i = 0; i < n; ++i) {
    const int y = cells[i] / w, x = cells[i] % w;
    for (int d = 0; d < 4; ++d) {
      const int yy = y + kDy[d], xx = x + kDx[d];
      nbr_pix[i][static_cast<size_t>(d)] = yy * w + xx;
      nbr[i][static_cast<size_t>(d)] = index[static_cast<size_t>(yy) * w + xx];
    }
  }

  auto apply = [&](const std::vector<double>& v, std::vector<double>& av) {
    for (size_t i = 0; i < n; ++i) {
      double s = 4.0 * v[i];
      for (int d = 0; d < 4; ++d) {
        const int j = nbr[i][static_cast<size_t>(d)];
        if (j >= 0) s -= v[static_cast<size_t>(j)];
      }
      av[i] = s;
    }
  };

  int total_iters = 0;
  double worst_residual = 0.0;

  for (int c = 0; c < 3; ++c) {
    // Right-hand side: guidance Laplacian of fake plus source boundary terms.
    std::vector<double> b(n), x(n), r(n), p(n), ap(n);
    for (size_t i = 0; i < n; ++i) {
      const int pix = cells[i];
      double rhs = 4.0 * fake.data[static_cast<size_t>(pix) * 3 + c];
      for (int d = 0; d < 4; ++d) {
        const int np = nbr_pix[i][static_cast<size_t>(d)];
        rhs -= fake.data[static_cast<size_t>(np) * 3 + c];
        if (nbr[i][static_cast<size_t>(d)] < 0)
          rhs += source.data[static_cast<size_t>(np) * 3 + c];
      }
      b[i] = rhs;
      x[i] = fake.data[static_cast<size_t>(pix) * 3 + c];  // warm start
    }

    apply(x, ap);
    double rr = 0.0, rmax = 0.0;
    for (size_t i = 0; i < n; ++i) {
      r[i] = b[i] - ap[i];
      rr += r[i] * r[i];
      rmax = std::max(rmax, std::abs(r[i]));
    }
    p = r;

    int it = 0;
    while (rmax > tol) {
      if (it >= max_iters)
        throw std::runtime_error("poisson_blend: no convergence after " +
                                 std::to_string(max_iters) + " iterations");
      apply(p, ap);
      double pap = 0.0;
      for (size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
      const double alpha = rr / pap;
      double rr_new = 0.0;
      rmax = 0.0;
      for (size_t i = 0; i < n; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
        rr_new += r[i] * r[i];
        rmax = std::max(rmax, std::abs(r[i]));
      }
      const double beta = rr_new / rr;
      rr = rr_new;
      for (size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
      ++it;
    }
    total_iters = std::max(total_iters, it);
    worst_residual = std::max(worst_residual, rmax);

    for (size_t i = 0; i < n; ++i)
      out.data[static_cast<size_t>(cells[i]) * 3 + c] = std::clamp(x[i], 0.0, 1.0);
  }

  if (stats) *stats = {total_iters, worst_residual};
  return out;
}

}  // namespace caddm
