#include <doctest.h>

#include <stdexcept>
#include <cmath>

#include "caddm/losses.hpp"
#include "caddm/rng.hpp"

using namespace caddm;

TEST_CASE("classification loss at uniform and confident logits") {
  CHECK(classification_loss({0, 0}, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(classification_loss({0, 0}, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  // Direct softmax evaluation: -log(e^10/(e^10+e^-10)) = log(1+e^-20).
  CHECK(classification_loss({10, -10}, 0) ==
        doctest::Approx(std::log1p(std::exp(-20.0))).epsilon(1e-9));
}

TEST_CASE("classification loss decreases as the true logit grows") {
  double prev = classification_loss({-3.0, 0.2}, 0);
  for (double l = -2.5; l < 4.0; l += 0.5) {
    const double cur = classification_loss({l, 0.2}, 0);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("classification gradient is softmax minus onehot") {
  std::array<double, 2> g;
  classification_loss({1.3, -0.4}, 1, &g);
  const double p1 = 1.0 / (1.0 + std::exp(-(-0.4 - 1.3)));
  CHECK(g[1] == doctest::Approx(p1 - 1.0).epsilon(1e-12));
  CHECK(g[0] == doctest::Approx(-g[1]).epsilon(1e-12));
}

namespace {

DetectionTargets targets_with_positives(size_t n, const std::vector<size_t>& positives) {
  DetectionTargets t;
  t.match_indicator.assign(n, 0);
  t.matched_gt.assign(n, -1);
  t.offsets.assign(n, {0, 0, 0, 0});
  for (size_t i : positives) {
    t.match_indicator[i] = 1;
    t.matched_gt[i] = 0;
    ++t.n_positives;
  }
  return t;
}

}  // namespace

TEST_CASE("confidence loss with equal logits mines 3 negatives per positive") {
  const size_t n = 10;
  std::vector<std::array<double, 2>> logits(n, {0.0, 0.0});
  const DetectionTargets t = targets_with_positives(n, {2});
  const ConfidenceLoss c = confidence_loss(logits, t);
  CHECK(c.n_mined_negatives == 3);
  CHECK(c.value == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("confidence loss is tiny for confident correct logits") {
  const size_t n = 20;
  std::vector<std::array<double, 2>> logits(n, {10.0, -10.0});
  logits[5] = {-10.0, 10.0};
  const DetectionTargets t = targets_with_positives(n, {5});
  const ConfidenceLoss c = confidence_loss(logits, t);
  CHECK(c.value < 1e-6);
}

TEST_CASE("no positives caps mined negatives at 48") {
  const size_t n = 100;
  std::vector<std::array<double, 2>> logits(n, {0.0, 0.0});
  const DetectionTargets t = targets_with_positives(n, {});
  const ConfidenceLoss c = confidence_loss(logits, t);
  CHECK(c.n_mined_negatives == 48);
}

TEST_CASE("mining picks the highest-loss negatives") {
  std::vector<std::array<double, 2>> logits(6, {5.0, -5.0});  // easy negatives
  logits[0] = {-9.0, 9.0};                                    // positive slot
  logits[3] = {-2.0, 2.0};                                    // hard negative
  logits[4] = {-1.0, 1.0};                                    // next hardest
  const DetectionTargets t = targets_with_positives(6, {0});
  const ConfidenceLoss c = confidence_loss(logits, t);
  REQUIRE(c.mined.size() == 3);
  CHECK(c.mined[0] == 3);
  CHECK(c.mined[1] == 4);
}

TEST_CASE("confidence gradient matches central finite differences") {
  Rng rng(41);
  const size_t n = 30;
  std::vector<std::array<double, 2>> logits(n);
  for (auto& l : logits) l = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
  const DetectionTargets t = targets_with_positives(n, {3, 17});

  std::vector<std::array<double, 2>> grad;
  const ConfidenceLoss base = confidence_loss(logits, t, 3, 48, &grad);

  // The mined set must be stable under the probe step, otherwise the
  // finite difference straddles a selection change.
  {
    std::vector<double> neg_losses;
    for (size_t i = 0; i < n; ++i) {
      if (t.match_indicator[i]) continue;
      const double m = std::max(logits[i][0], logits[i][1]);
      neg_losses.push_back(std::log(std::exp(logits[i][0] - m) + std::exp(logits[i][1] - m)) -
                           (logits[i][0] - m));
    }
    std::sort(neg_losses.begin(), neg_losses.end(), std::greater<>());
    REQUIRE(neg_losses[5] - neg_losses[6] > 1e-3);
  }

  const double eps = 1e-4;
  double worst = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (int k = 0; k < 2; ++k) {
      auto plus = logits, minus = logits;
      plus[i][static_cast<size_t>(k)] += eps;
      minus[i][static_cast<size_t>(k)] -= eps;
      const double fd = (confidence_loss(plus, t).value - confidence_loss(minus, t).value) /
                        (2 * eps);
      const double an = grad[i][static_cast<size_t>(k)];
      const double rel = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-6});
      worst = std::max(worst, rel);
    }
  }
  CHECK(worst < 1e-4);
  CHECK(base.value > 0.0);
}

TEST_CASE("location loss values") {
  const size_t n = 5;
  DetectionTargets t = targets_with_positives(n, {2});
  t.offsets[2] = {0.1, -0.2, 0.3, 0.4};

  std::vector<std::array<double, 4>> pred(n, {0, 0, 0, 0});
  pred[2] = t.offsets[2];
  CHECK(location_loss(pred, t) == doctest::Approx(0.0));

  pred[2] = {0.1 + 2.0, -0.2, 0.3, 0.4};
  CHECK(location_loss(pred, t) == doctest::Approx(1.5).epsilon(1e-12));

  pred[2] = {0.1 + 0.5, -0.2, 0.3, 0.4};
  CHECK(location_loss(pred, t) == doctest::Approx(0.125).epsilon(1e-12));

  // Negatives never contribute.
  pred[0] = {9, 9, 9, 9};
  CHECK(location_loss(pred, t) == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("total loss composition") {
  const LossBreakdown b = total_loss(0.5, 2.0, 3.0, 1, 3, 1.0, 0.1);
  CHECK(b.det == doctest::Approx(5.0));
  CHECK(b.total == doctest::Approx(1.0));
  CHECK(b.n_positives == 1);

  CHECK(total_loss(0.7, 2.0, 3.0, 2, 6, 1.0, 0.0).total == doctest::Approx(0.7));

  // No positives: loc is dropped and conf normalizes by the mined count.
  const LossBreakdown z = total_loss(0.5, 9.6, 123.0, 0, 48, 1.0, 0.1);
  CHECK(z.loc == 0.0);
  CHECK(z.det == doctest::Approx(0.2));
  CHECK(z.conf == doctest::Approx(0.2));
  CHECK(total_loss(0.5, 9.6, 7.0, 0, 48, 1.0, 0.1).det == z.det);
}

TEST_CASE("breakdown invariant holds in both regimes") {
  Rng rng(42);
  for (int k = 0; k < 50; ++k) {
    const double cls = rng.uniform(0, 2), conf = rng.uniform(0, 5), loc = rng.uniform(0, 5);
    const int n_pos = static_cast<int>(rng.uniform_int(0, 4));
    const int mined = n_pos > 0 ? 3 * n_pos : 48;
    const double alpha = rng.uniform(0, 2), beta = rng.uniform(0, 1);
    const LossBreakdown b = total_loss(cls, conf, loc, n_pos, mined, alpha, beta);
    CHECK(b.total == doctest::Approx(beta * b.det + b.cls).epsilon(1e-12));
    CHECK(b.det ==
          doctest::Approx((b.conf + alpha * b.loc) / std::max(b.n_positives, 1)).epsilon(1e-12));
    CHECK(b.total >= 0.0);
  }
}

TEST_CASE("total loss is linear in beta with slope det") {
  const double cls = 0.4, conf = 1.2, loc = 0.6;
  const LossBreakdown b1 = total_loss(cls, conf, loc, 2, 6, 1.0, 0.0);
  const LossBreakdown b2 = total_loss(cls, conf, loc, 2, 6, 1.0, 0.5);
  const LossBreakdown b3 = total_loss(cls, conf, loc, 2, 6, 1.0, 1.0);
  CHECK(b2.total - b1.total == doctest::Approx(0.5 * b2.det).epsilon(1e-12));
  CHECK(b3.total - b2.total == doctest::Approx(0.5 * b2.det).epsilon(1e-12));
}
