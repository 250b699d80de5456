#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "caddm/blend.hpp"
#include "caddm/dssim.hpp"
#include "caddm/integral.hpp"
#include "caddm/jpeg_codec.hpp"
#include "caddm/png_io.hpp"
#include "caddm/rng.hpp"

using namespace caddm;

namespace {

Image random_image(int h, int w, Rng& rng) {
  Image img(h, w);
  for (double& v : img.data) v = rng.uniform();
  return img;
}

int mirror101(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

// Independent oracle: direct per-pixel 11x11 Gaussian-weighted SSIM on the
// channel-mean plane, no separable filtering, no prefilters.
DssimMap naive_dssim(const Image& a, const Image& b) {
  const int radius = 5;
  const double sigma = 1.5;
  double w[11][11], wsum = 0.0;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx) {
      w[dy + radius][dx + radius] = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      wsum += w[dy + radius][dx + radius];
    }
  for (auto& row : w)
    for (double& v : row) v /= wsum;

  auto lum = [](const Image& img, int y, int x) {
    return (img.at(y, x, 0) + img.at(y, x, 1) + img.at(y, x, 2)) / 3.0;
  };

  DssimMap out(a.height, a.width);
  for (int y = 0; y < a.height; ++y)
    for (int x = 0; x < a.width; ++x) {
      double ma = 0, mb = 0, maa = 0, mbb = 0, mab = 0;
      for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx) {
          const int yy = mirror101(y + dy, a.height);
          const int xx = mirror101(x + dx, a.width);
          const double wa = w[dy + radius][dx + radius];
          const double va = lum(a, yy, xx), vb = lum(b, yy, xx);
          ma += wa * va;
          mb += wa * vb;
          maa += wa * va * va;
          mbb += wa * vb * vb;
          mab += wa * va * vb;
        }
      const double va = maa - ma * ma, vb = mbb - mb * mb, cov = mab - ma * mb;
      const double ssim = ((2 * ma * mb + kSsimC1) * (2 * cov + kSsimC2)) /
                          ((ma * ma + mb * mb + kSsimC1) * (va + vb + kSsimC2));
      out.at(y, x) = (1.0 - ssim) / 2.0;
    }
  return out;
}

}  // namespace

TEST_CASE("dssim of identical inputs is the zero map") {
  Rng rng(11);
  const Image a = random_image(16, 20, rng);
  const DssimMap d = dssim_map(a, a);
  for (double v : d.values) CHECK(v == 0.0);
}

TEST_CASE("dssim is symmetric") {
  Rng rng(12);
  const Image a = random_image(16, 16, rng);
  const Image b = random_image(16, 16, rng);
  const DssimMap ab = dssim_map(a, b);
  const DssimMap ba = dssim_map(b, a);
  CHECK(ab.values == ba.values);
}

TEST_CASE("dssim matches the naive windowed oracle to 1e-9") {
  Rng rng(13);
  const Image a = random_image(32, 32, rng);
  const Image b = random_image(32, 32, rng);
  const DssimMap fast = dssim_map(a, b);
  const DssimMap slow = naive_dssim(a, b);
  double worst = 0.0;
  for (size_t i = 0; i < fast.size(); ++i)
    worst = std::max(worst, std::abs(fast.values[i] - slow.values[i]));
  CHECK(worst < 1e-9);
  for (double v : fast.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("dssim rejects shape mismatch and undersized images") {
  Rng rng(14);
  const Image a = random_image(16, 16, rng);
  const Image b = random_image(16, 18, rng);
  CHECK_THROWS_AS(dssim_map(a, b), std::invalid_argument);
  const Image tiny = random_image(4, 16, rng);
  CHECK_THROWS_AS(dssim_map(tiny, tiny), std::invalid_argument);
}

TEST_CASE("summed area table counts an all-ones map") {
  Plane m(4, 4, 1.0);
  const SummedAreaTable t(m);
  CHECK(t.at(3, 3) == 16.0);
  CHECK(t.rect_sum(0, 0, 4, 4) == 16.0);
  CHECK(t.window_sum(1, 1, 2, 3) == 6.0);
}

TEST_CASE("rectangle sums equal brute force exactly on integer fixtures") {
  Rng rng(15);
  Plane m(64, 64);
  for (double& v : m.values) v = static_cast<double>(rng.uniform_int(0, 255));
  const SummedAreaTable t(m);
  CHECK(t.rect_sum(0, 0, 64, 64) == [&] {
    double s = 0;
    for (double v : m.values) s += v;
    return s;
  }());
  for (int k = 0; k < 100; ++k) {
    const int y0 = static_cast<int>(rng.uniform_int(0, 63));
    const int y1 = static_cast<int>(rng.uniform_int(y0 + 1, 64));
    const int x0 = static_cast<int>(rng.uniform_int(0, 63));
    const int x1 = static_cast<int>(rng.uniform_int(x0 + 1, 64));
    double direct = 0.0;
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) direct += m.at(y, x);
    CHECK(t.rect_sum(y0, x0, y1, x1) == direct);
  }
}

TEST_CASE("alpha blend endpoints and convexity") {
  Rng rng(16);
  const Image f = random_image(12, 12, rng);
  const Image s = random_image(12, 12, rng);

  Mask ones(12, 12, 1.0), zeros(12, 12, 0.0), half(12, 12, 0.5);
  CHECK(alpha_blend(f, s, ones).data == f.data);
  CHECK(alpha_blend(f, s, zeros).data == s.data);

  const Image cf(12, 12, 0.2), cs(12, 12, 0.6);
  const Image mid = alpha_blend(cf, cs, half);
  for (double v : mid.data) CHECK(v == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("alpha blend complementary sum identity") {
  Rng rng(17);
  const Image f = random_image(10, 14, rng);
  const Image s = random_image(10, 14, rng);
  Mask m(10, 14);
  for (double& v : m.values) v = rng.uniform();
  const Image ab = alpha_blend(f, s, m);
  const Image ba = alpha_blend(s, f, m);
  for (size_t i = 0; i < f.data.size(); ++i)
    CHECK(std::abs(ab.data[i] + ba.data[i] - f.data[i] - s.data[i]) < 1e-9);
}

namespace {

Image smooth_image(int h, int w, double lo, double hi, double phase) {
  Image img(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        img.at(y, x, c) =
            lo + (hi - lo) * 0.5 *
                     (1.0 + std::sin(phase + 0.3 * x + 0.2 * y + 0.5 * c));
  return img;
}

}  // namespace

TEST_CASE("poisson blend on constant inputs returns the constant") {
  const Image f(16, 16, 0.37), s(16, 16, 0.37);
  Mask m(16, 16, 0.0);
  for (int y = 4; y < 12; ++y)
    for (int x = 4; x < 12; ++x) m.at(y, x) = 1.0;
  const Image out = poisson_blend(f, s, m);
  for (double v : out.data) CHECK(v == doctest::Approx(0.37).epsilon(1e-6));
}

TEST_CASE("poisson blend with empty mask returns source") {
  Rng rng(18);
  const Image f = random_image(16, 16, rng);
  const Image s = random_image(16, 16, rng);
  Mask m(16, 16, 0.0);
  CHECK(poisson_blend(f, s, m).data == s.data);
}

TEST_CASE("poisson blend satisfies the guidance system") {
  const Image f = smooth_image(16, 16, 0.3, 0.7, 0.0);
  const Image s = smooth_image(16, 16, 0.25, 0.75, 1.3);
  Mask m(16, 16, 0.0);
  for (int y = 4; y < 12; ++y)
    for (int x = 4; x < 12; ++x) m.at(y, x) = 1.0;

  PoissonStats stats;
  const Image out = poisson_blend(f, s, m, &stats);
  CHECK(stats.residual_max <= 1e-3);

  // Outside the mask: source, bit exact.
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x)
      if (m.at(y, x) == 0.0)
        for (int c = 0; c < 3; ++c) CHECK(out.at(y, x, c) == s.at(y, x, c));

  // Inside: discrete Laplacian of the output matches the guidance field.
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      if (m.at(y, x) == 0.0) continue;
      for (int c = 0; c < 3; ++c) {
        const double lo = 4 * out.at(y, x, c) - out.at(y - 1, x, c) - out.at(y + 1, x, c) -
                          out.at(y, x - 1, c) - out.at(y, x + 1, c);
        const double lf = 4 * f.at(y, x, c) - f.at(y - 1, x, c) - f.at(y + 1, x, c) -
                          f.at(y, x - 1, c) - f.at(y, x + 1, c);
        CHECK(std::abs(lo - lf) <= 1e-3 + 1e-12);
      }
    }
}

TEST_CASE("poisson blend rejects border masks and non-binary masks") {
  Rng rng(19);
  const Image f = random_image(16, 16, rng);
  const Image s = random_image(16, 16, rng);
  Mask border(16, 16, 0.0);
  for (int x = 0; x < 16; ++x) border.at(0, x) = 1.0;
  CHECK_THROWS_AS(poisson_blend(f, s, border), std::invalid_argument);
  Mask soft(16, 16, 0.0);
  soft.at(8, 8) = 0.5;
  CHECK_THROWS_AS(poisson_blend(f, s, soft), std::invalid_argument);
}

TEST_CASE("png round trip preserves 8-bit content") {
  Rng rng(20);
  Image img = random_image(16, 24, rng);
  // Snap to the 8-bit grid first so the round trip is exact.
  for (double& v : img.data) v = to_byte(v) / 255.0;
  const auto path = (std::filesystem::temp_directory_path() / "caddm_png_test.png").string();
  write_png(path, img);
  const Image back = read_png(path);
  REQUIRE(back.same_shape(img));
  CHECK(back.data == img.data);
  std::filesystem::remove(path);
}

TEST_CASE("round-half-up byte conversion") {
  CHECK(to_byte(0.0) == 0);
  CHECK(to_byte(1.0) == 255);
  CHECK(to_byte(0.5 / 255.0) == 1);          // exactly half rounds up
  CHECK(to_byte(0.49 / 255.0) == 0);
  CHECK(to_byte(254.5 / 255.0) == 255);
}

TEST_CASE("jpeg round trip keeps shape and range") {
  Rng rng(21);
  const Image img = smooth_image(32, 32, 0.1, 0.9, 0.4);
  const Image back = jpeg_roundtrip(img, 80);
  REQUIRE(back.same_shape(img));
  double worst = 0.0;
  for (size_t i = 0; i < img.data.size(); ++i) {
    CHECK(back.data[i] >= 0.0);
    CHECK(back.data[i] <= 1.0);
    worst = std::max(worst, std::abs(back.data[i] - img.data[i]));
  }
  // Smooth content survives quality 80 with small error.
  CHECK(worst < 0.15);
}
