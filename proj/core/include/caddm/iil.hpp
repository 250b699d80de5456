#pragma once

#include <string>
#include <vector>

namespace caddm {

// Final-layer (pre-classifier) feature of one image.
struct FeatureRecord {
  std::vector<double> feature;
  std::string identity;
  int label = 0;  // 1 = fake
};

// JSON-lines feature dump; vectors are base64 of little-endian 32-bit floats.
std::vector<FeatureRecord> read_feature_records(const std::string& path);
void write_feature_records(const std::string& path, const std::vector<FeatureRecord>& recs);

struct OverlapDistribution {
  double threshold = 0;
  std::vector<int> counts;  // per identity, order of first appearance
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

// Identity-overlap diagnostic: features are PCA-projected to 2D (principal
// axes of the mean-centered set), each identity's region is the axis-aligned
// bounding rectangle of its projected points, and two identities overlap at
// threshold t when their rectangle IoU is at least t. genuine_only restricts
// the point sets to genuine records. An identity with fewer than two points
// has no rectangle and is rejected.
std::vector<OverlapDistribution> id_overlap(const std::vector<FeatureRecord>& features,
                                            const std::vector<double>& thresholds,
                                            bool genuine_only = false);

struct ProbeResult {
  std::vector<double> train_loss;   // per epoch
  std::vector<double> heldout_acc;  // per epoch
  size_t n_classes = 0;
  size_t n_train = 0, n_heldout = 0;
};

// Identity linear probe: multinomial logistic regression on L2-normalized
// features, full-batch gradient descent from zero weights, 80/20 stratified
// split. The split shuffle is the only randomness.
ProbeResult id_linear_probe(const std::vector<FeatureRecord>& features,
                            double train_fraction = 0.8, int epochs = 200,
                            double lr = 0.1, uint64_t split_seed = 0);

// Equal-interval subsample: keeps per identity at most k records
// (indices floor(i*n/k) of that identity's list).
std::vector<FeatureRecord> sample_per_identity(const std::vector<FeatureRecord>& features,
                                               int k);

}  // namespace caddm
