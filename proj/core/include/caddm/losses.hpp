#pragma once

#include <array>
#include <vector>

#include "caddm/anchors.hpp"

namespace caddm {

// Class index convention everywhere: 0 = genuine/negative, 1 = fake/positive.

struct LossBreakdown {
  double total = 0;  // beta * det + cls
  double cls = 0;
  double conf = 0;   // when n_positives == 0 this is already normalized by
                     // the mined-negative count, so det == conf holds there
  double loc = 0;
  double det = 0;    // (conf + alpha * loc) / max(N, 1)
  int n_positives = 0;
};

// Softmax cross-entropy on a two-way logit pair. Optional gradient
// (softmax - onehot) for the caller that backpropagates.
double classification_loss(const std::array<double, 2>& logits, int label,
                           std::array<double, 2>* grad = nullptr);

struct ConfidenceLoss {
  double value = 0;             // unnormalized sum over positives and mined negatives
  int n_mined_negatives = 0;
  std::vector<size_t> mined;    // the selected negative anchors
};

// -sum_pos log c_pos - sum_neg log c_neg with hard-negative mining:
// the highest-loss negatives at neg_pos_ratio per positive, or at most
// neg_cap_no_positives when the image has no positive anchor. grad, when
// given, is resized to the anchor count and zero outside the selected set.
ConfidenceLoss confidence_loss(const std::vector<std::array<double, 2>>& anchor_logits,
                               const DetectionTargets& targets,
                               int neg_pos_ratio = 3, int neg_cap_no_positives = 48,
                               std::vector<std::array<double, 2>>* grad = nullptr);

// Smooth-L1 between predicted and encoded target offsets, summed over
// positive anchors and the four box coordinates. Zero when nothing matched.
double location_loss(const std::vector<std::array<double, 4>>& pred_offsets,
                     const DetectionTargets& targets,
                     std::vector<std::array<double, 4>>* grad = nullptr);

// Combines the pieces: det = (conf + alpha*loc)/N for N >= 1, and
// det = conf/n_mined_negatives for N == 0 (loc is forced to zero there).
LossBreakdown total_loss(double cls, double conf, double loc, int n_positives,
                         int n_mined_negatives, double alpha = 1.0, double beta = 0.1);

inline double smooth_l1(double z) {
  const double a = z < 0 ? -z : z;
  return a < 1.0 ? 0.5 * z * z : a - 0.5;
}

inline double smooth_l1_grad(double z) {
  if (z >= 1.0) return 1.0;
  if (z <= -1.0) return -1.0;
  return z;
}

}  // namespace caddm
