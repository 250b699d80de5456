#include "caddm/eval.hpp"

#include <cmath>
#include <filesystem>

#include "caddm/parallel.hpp"
#include "caddm/png_io.hpp"

namespace caddm {

namespace fs = std::filesystem;

nn::Tensor to_tensor(const Image& img, const DatasetStats& stats) {
  nn::Tensor t(3, img.height, img.width);
  for (int c = 0; c < 3; ++c) {
    const double mean = stats.mean[static_cast<size_t>(c)];
    const double inv = 1.0 / stats.stdev[static_cast<size_t>(c)];
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) t.at(c, y, x) = (img.at(y, x, c) - mean) * inv;
  }
  return t;
}

std::string resolve_path(const std::string& ann_file, const std::string& rel) {
  const fs::path p(rel);
  if (p.is_absolute()) return p.lexically_normal().string();
  return (fs::path(ann_file).parent_path() / p).lexically_normal().string();
}

ScoreResult score_annotations(const Network& net, const DatasetStats& stats,
                              const std::vector<ArtifactAnnotation>& anns,
                              const std::string& ann_file, const ScoreOptions& opts) {
  ScoreResult res;
  res.records.resize(anns.size());
  if (opts.collect_features) res.features.resize(anns.size());

  parallel_for(anns.size(), opts.jobs, [&](size_t i) {
    const ArtifactAnnotation& a = anns[i];
    const Image img = read_png(resolve_path(ann_file, a.image_path));
    Network::Acts acts;
    ModelOutput out;
    net.forward(to_tensor(img, stats), acts, out);
    const double m = std::max(out.image_logits[0], out.image_logits[1]);
    const double e0 = std::exp(out.image_logits[0] - m);
    const double e1 = std::exp(out.image_logits[1] - m);
    res.records[i] = {e1 / (e0 + e1), a.fake ? 1 : 0, a.group_id};
    if (opts.collect_features) {
      res.features[i].feature = out.feature;
      res.features[i].identity = a.identity;
      res.features[i].label = a.fake ? 1 : 0;
    }
  });
  return res;
}

std::optional<Detection> top_detection(const Network& net, const ModelOutput& out,
                                       double nms_iou, double score_threshold) {
  const AnchorSet& anchors = net.anchors();
  std::vector<BoxXYXY> boxes(anchors.size());
  std::vector<double> scores(anchors.size());
  for (size_t i = 0; i < anchors.size(); ++i) {
    const auto& l = out.anchor_logits[i];
    const double m = std::max(l[0], l[1]);
    const double e0 = std::exp(l[0] - m), e1 = std::exp(l[1] - m);
    scores[i] = e1 / (e0 + e1);
    BoxXYXY b = decode_offsets(anchors.boxes[i], out.anchor_offsets[i]);
    // Guard degenerate decodes for NMS.
    b.x1 = std::max(b.x1, b.x0 + 1e-9);
    b.y1 = std::max(b.y1, b.y0 + 1e-9);
    boxes[i] = b;
  }
  const auto kept = nms(boxes, scores, nms_iou);
  if (kept.empty()) return std::nullopt;
  const size_t best = kept.front();
  if (scores[best] < score_threshold) return std::nullopt;
  return Detection{boxes[best], scores[best]};
}

}  // namespace caddm
