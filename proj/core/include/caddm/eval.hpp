#pragma once

#include <optional>
#include <string>
#include <vector>

#include "caddm/annotation.hpp"
#include "caddm/checkpoint.hpp"
#include "caddm/iil.hpp"
#include "caddm/image.hpp"
#include "caddm/metrics.hpp"
#include "caddm/nn/network.hpp"

namespace caddm {

// Channel-normalized CHW tensor for the network input.
nn::Tensor to_tensor(const Image& img, const DatasetStats& stats);

// Annotation paths resolve relative to the annotation file's directory.
std::string resolve_path(const std::string& ann_file, const std::string& rel);

struct ScoreOptions {
  int jobs = 1;
  bool collect_features = false;
};

struct ScoreResult {
  std::vector<EvalRecord> records;      // one per annotation, same order
  std::vector<FeatureRecord> features;  // filled when collect_features
};

// Runs the network over every annotated image; the record score is the
// fake-class probability of the image-level logits.
ScoreResult score_annotations(const Network& net, const DatasetStats& stats,
                              const std::vector<ArtifactAnnotation>& anns,
                              const std::string& ann_file,
                              const ScoreOptions& opts = {});

struct Detection {
  BoxXYXY box;
  double score = 0;
};

// Visualization rule: decode all anchors, suppress with NMS, keep the top
// scoring survivor, and only if its score clears the threshold.
std::optional<Detection> top_detection(const Network& net, const ModelOutput& out,
                                       double nms_iou = 0.5,
                                       double score_threshold = 0.5);

}  // namespace caddm
