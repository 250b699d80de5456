#include "caddm/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace caddm {

namespace {

// Stable two-way softmax.
inline std::array<double, 2> softmax2(const std::array<double, 2>& l) {
  const double m = std::max(l[0], l[1]);
  const double e0 = std::exp(l[0] - m), e1 = std::exp(l[1] - m);
  const double z = e0 + e1;
  return {e0 / z, e1 / z};
}

// -log softmax(l)[k], computed without forming the probability.
inline double nll2(const std::array<double, 2>& l, int k) {
  const double m = std::max(l[0], l[1]);
  const double z = std::exp(l[0] - m) + std::exp(l[1] - m);
  return std::log(z) - (l[static_cast<size_t>(k)] - m);
}

}  // namespace

double classification_loss(const std::array<double, 2>& logits, int label,
                           std::array<double, 2>* grad) {
  if (label != 0 && label != 1) throw std::invalid_argument("classification_loss: bad label");
  if (grad) {
    const auto p = softmax2(logits);
    (*grad)[0] = p[0] - (label == 0 ? 1.0 : 0.0);
    (*grad)[1] = p[1] - (label == 1 ? 1.0 : 0.0);
  }
  return nll2(logits, label);
}

ConfidenceLoss confidence_loss(const std::vector<std::array<double, 2>>& anchor_logits,
                               const DetectionTargets& targets,
                               int neg_pos_ratio, int neg_cap_no_positives,
                               std::vector<std::array<double, 2>>* grad) {
  const size_t n = anchor_logits.size();
  if (targets.match_indicator.size() != n)
    throw std::invalid_argument("confidence_loss: targets do not match anchor count");
  if (grad) grad->assign(n, {0.0, 0.0});

  ConfidenceLoss out;
  std::vector<std::pair<double, size_t>> neg_losses;
  neg_losses.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    if (targets.match_indicator[i]) {
      out.value += nll2(anchor_logits[i], 1);
      if (grad) {
        const auto p = softmax2(anchor_logits[i]);
        (*grad)[i] = {p[0], p[1] - 1.0};
      }
    } else {
      neg_losses.emplace_back(nll2(anchor_logits[i], 0), i);
    }
  }

  const int n_pos = targets.n_positives;
  size_t keep = n_pos > 0 ? static_cast<size_t>(neg_pos_ratio) * static_cast<size_t>(n_pos)
                          : static_cast<size_t>(neg_cap_no_positives);
  keep = std::min(keep, neg_losses.size());
  std::stable_sort(neg_losses.begin(), neg_losses.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (size_t k = 0; k < keep; ++k) {
    out.value += neg_losses[k].first;
    out.mined.push_back(neg_losses[k].second);
    if (grad) {
      const size_t i = neg_losses[k].second;
      const auto p = softmax2(anchor_logits[i]);
      (*grad)[i] = {p[0] - 1.0, p[1]};
    }
  }
  out.n_mined_negatives = static_cast<int>(keep);
  return out;
}

double location_loss(const std::vector<std::array<double, 4>>& pred_offsets,
                     const DetectionTargets& targets,
                     std::vector<std::array<double, 4>>* grad) {
  const size_t n = pred_offsets.size();
  if (targets.match_indicator.size() != n)
    throw std::invalid_argument("location_loss: targets do not match anchor count");
  if (grad) grad->assign(n, {0.0, 0.0, 0.0, 0.0});
  double loss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (!targets.match_indicator[i]) continue;
    for (size_t m = 0; m < 4; ++m) {
      const double z = pred_offsets[i][m] - targets.offsets[i][m];
      loss += smooth_l1(z);
      if (grad) (*grad)[i][m] = smooth_l1_grad(z);
    }
  }
  return loss;
}

LossBreakdown total_loss(double cls, double conf, double loc, int n_positives,
                         int n_mined_negatives, double alpha, double beta) {
  if (alpha < 0 || beta < 0) throw std::invalid_argument("total_loss: alpha, beta must be >= 0");
  LossBreakdown b;
  b.cls = cls;
  b.n_positives = n_positives;
  if (n_positives >= 1) {
    b.conf = conf;
    b.loc = loc;
    b.det = (conf + alpha * loc) / n_positives;
  } else {
    b.conf = n_mined_negatives > 0 ? conf / n_mined_negatives : 0.0;
    b.loc = 0.0;
    b.det = b.conf;
  }
  b.total = beta * b.det + cls;
  return b;
}

}  // namespace caddm
