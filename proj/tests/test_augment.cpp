#include <doctest.h>

#include <stdexcept>
#include "caddm/augment.hpp"

using namespace caddm;

namespace {

Image random_image(int h, int w, Rng& rng) {
  Image img(h, w);
  for (double& v : img.data) v = rng.uniform();
  return img;
}

}  // namespace

TEST_CASE("zero apply probability is the identity") {
  Rng img_rng(81);
  const Image img = random_image(112, 112, img_rng);
  const PixelBoxes boxes{{10, 12, 40, 50}};
  AugmentConfig cfg;
  cfg.p_apply = 0.0;
  Rng rng(1);
  const AugmentResult r = augment(img, boxes, cfg, rng);
  CHECK(r.image.data == img.data);
  CHECK(r.boxes == boxes);
}

TEST_CASE("disabled augmentation is the identity") {
  Rng img_rng(82);
  const Image img = random_image(112, 112, img_rng);
  AugmentConfig cfg;
  cfg.enabled = false;
  Rng rng(2);
  const AugmentResult r = augment(img, {{1, 2, 3, 4}}, cfg, rng);
  CHECK(r.image.data == img.data);
}

TEST_CASE("a full-image crop leaves boxes unchanged") {
  Rng img_rng(83);
  const Image img = random_image(112, 112, img_rng);
  const PixelBoxes boxes{{5, 6, 30, 40}, {50, 60, 100, 110}};
  AugmentConfig cfg;
  cfg.p_apply = 1.0;
  cfg.crop_fraction_range = {1.0, 1.0};
  cfg.blur_sigma_range = {0.0, 0.0};
  cfg.noise_sigma_range = {0.0, 0.0};
  cfg.jpeg_quality_range = {95, 95};
  Rng rng(3);
  const AugmentResult r = augment(img, boxes, cfg, rng);
  CHECK(r.boxes == boxes);
}

TEST_CASE("augmentation is deterministic per seed") {
  Rng img_rng(84);
  const Image img = random_image(112, 112, img_rng);
  const PixelBoxes boxes{{20, 20, 60, 80}};
  AugmentConfig cfg;  // defaults, everything possible
  Rng r1(42), r2(42);
  const AugmentResult a = augment(img, boxes, cfg, r1);
  const AugmentResult b = augment(img, boxes, cfg, r2);
  CHECK(a.image.data == b.image.data);
  CHECK(a.boxes == b.boxes);
}

TEST_CASE("noise at fixed sigma is reproducible and clamped") {
  Rng img_rng(85);
  const Image img = random_image(112, 112, img_rng);
  AugmentConfig cfg;
  cfg.p_apply = 1.0;
  cfg.crop_fraction_range = {1.0, 1.0};
  cfg.blur_sigma_range = {0.0, 0.0};
  cfg.noise_sigma_range = {0.05, 0.05};
  cfg.jpeg_quality_range = {95, 95};
  Rng r1(7), r2(7);
  const AugmentResult a = augment(img, {}, cfg, r1);
  const AugmentResult b = augment(img, {}, cfg, r2);
  CHECK(a.image.data == b.image.data);
  bool changed = false;
  for (size_t i = 0; i < img.data.size(); ++i) {
    CHECK(a.image.data[i] >= 0.0);
    CHECK(a.image.data[i] <= 1.0);
    if (a.image.data[i] != img.data[i]) changed = true;
  }
  CHECK(changed);
}

TEST_CASE("surviving boxes stay inside bounds; small remnants are dropped") {
  Rng img_rng(86);
  const Image img = random_image(112, 112, img_rng);
  AugmentConfig cfg;
  cfg.p_apply = 1.0;
  cfg.blur_sigma_range = {0.0, 0.0};
  cfg.noise_sigma_range = {0.0, 0.0};
  cfg.jpeg_quality_range = {95, 95};
  cfg.crop_fraction_range = {0.85, 1.0};
  for (int t = 0; t < 200; ++t) {
    Rng rng(900 + static_cast<uint64_t>(t));
    const PixelBoxes boxes{{0, 0, 12, 12}, {40, 40, 80, 80}};
    const AugmentResult r = augment(img, boxes, cfg, rng);
    CHECK(r.image.height == 112);
    CHECK(r.image.width == 112);
    for (const auto& b : r.boxes) {
      CHECK(b[0] >= 0);
      CHECK(b[1] >= 0);
      CHECK(b[2] > b[0]);
      CHECK(b[3] > b[1]);
      CHECK(b[2] <= 112);
      CHECK(b[3] <= 112);
    }
  }
}

TEST_CASE("a crop slicing most of a box drops it") {
  Image img(112, 112, 0.5);
  AugmentConfig cfg;
  cfg.p_apply = 1.0;
  cfg.crop_fraction_range = {0.9, 0.9};
  cfg.blur_sigma_range = {0.0, 0.0};
  cfg.noise_sigma_range = {0.0, 0.0};
  cfg.jpeg_quality_range = {95, 95};
  // A 6x6 box tucked in the corner survives a 0.9 crop only when the crop
  // window starts at the origin; scan seeds for a case where it is cut.
  bool dropped = false;
  for (int t = 0; t < 50 && !dropped; ++t) {
    Rng rng(100 + static_cast<uint64_t>(t));
    const AugmentResult r = augment(img, {{0, 0, 6, 6}}, cfg, rng);
    if (r.boxes.empty()) dropped = true;
  }
  CHECK(dropped);
}
