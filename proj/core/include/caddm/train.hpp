#pragma once

#include <memory>
#include <string>
#include <vector>

#include "caddm/augment.hpp"
#include "caddm/checkpoint.hpp"
#include "caddm/losses.hpp"
#include "caddm/mfs.hpp"
#include "caddm/nn/network.hpp"

namespace caddm {

enum class TrainMode { vbc, caddm };

struct LrPoint {
  int epoch = 0;
  double lr = 0;
};

struct TrainConfig {
  TrainMode mode = TrainMode::caddm;
  int batch_size = 32;
  int epochs = 30;
  int steps_per_epoch = 100;
  std::vector<LrPoint> lr_schedule{{0, 3.6e-3}, {10, 1e-3}, {20, 5e-4}};
  double alpha = 1.0;
  double beta = 0.1;
  double adam_beta1 = 0.9, adam_beta2 = 0.999, adam_eps = 1e-8;
  uint64_t seed = 7;
  int jobs = 1;
  bool mfs_enabled = true;
  MfsConfig mfs;
  AugmentConfig augment;
  NetworkConfig network;
  int neg_pos_ratio = 3;
  int neg_cap_no_positives = 48;
  int val_frames_per_group = 32;
  std::string train_annotations;
  std::string val_annotations;  // empty disables validation
};

TrainConfig load_train_config(const std::string& path);
std::string train_config_to_json_string(const TrainConfig& cfg);

struct TrainResult {
  std::string final_checkpoint;
  std::string best_checkpoint;
  std::string log_path;
  double best_val_frame_auc = -1.0;
  DatasetStats stats;
};

// Full training run: per-step JSON-lines log of all loss components,
// checkpoint at the end and at the best validation frame-AUC. A NaN loss
// aborts after dumping the offending batch. Fully seeded; results are
// independent of the worker count because per-sample gradients reduce in a
// fixed order.
TrainResult train(const TrainConfig& cfg, const std::string& out_dir);

// Step-level access for tests and diagnostics.
class Trainer {
 public:
  explicit Trainer(const TrainConfig& cfg);
  ~Trainer();

  LossBreakdown step(int epoch, int step_in_epoch);
  TrainResult run(const std::string& out_dir);

  Network& network();
  const Network& network() const;
  const DatasetStats& stats() const;
  const nn::AlignedVec& last_gradient() const;
  double last_batch_positive_fraction() const;  // steps with >= 1 positive anchor

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace caddm
