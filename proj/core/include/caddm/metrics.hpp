#pragma once

#include <optional>
#include <string>
#include <vector>

namespace caddm {

// One scored frame. score is the fake-class probability; label 1 = fake.
struct EvalRecord {
  double score = 0;
  int label = 0;
  std::string group;  // pseudo-video / identity group, may be empty
};

// Probability that a random positive outscores a random negative, ties
// counted half (the Mann-Whitney statistic, computed with midranks).
// Undefined when only one class is present.
std::optional<double> roc_auc(const std::vector<EvalRecord>& records);

// Fraction of records with (score >= threshold) matching the label.
double accuracy(const std::vector<EvalRecord>& records, double threshold = 0.5);

// Collapses frames to groups: up to frames_per_group equally spaced frames
// per group (frame i of k picks index floor(i*n/k)), group score = mean of
// the selection. Groups keep first-appearance order. A group with mixed
// labels is rejected.
std::vector<EvalRecord> video_level_scores(const std::vector<EvalRecord>& records,
                                           int frames_per_group = 32);

struct MetricsReport {
  double acc = 0;
  std::optional<double> frame_auc;
  std::optional<double> video_auc;
  size_t n = 0;
};

MetricsReport compute_metrics(const std::vector<EvalRecord>& records,
                              int frames_per_group = 32);

// JSON-lines score files: {"score": s, "label": 0|1, "group_id": "..."}.
std::vector<EvalRecord> read_eval_records(const std::string& path);
void write_eval_records(const std::string& path, const std::vector<EvalRecord>& records);

}  // namespace caddm
