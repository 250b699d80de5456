#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace caddm {

// One training/eval record. Boxes are integer pixel corners
// [x0, y0, x1, y1], half-open, x = column. Genuine records carry no boxes.
struct ArtifactAnnotation {
  std::string image_path;
  bool fake = false;
  std::string identity;
  std::optional<std::string> source_path;
  std::vector<std::array<int, 4>> artifact_boxes;
  std::string group_id;  // pseudo-video grouping for video-level metrics

  void validate(int image_h, int image_w) const;  // throws on bad boxes
};

// JSON-lines file, one object per record.
std::vector<ArtifactAnnotation> read_annotations(const std::string& path);
void write_annotations(const std::string& path, const std::vector<ArtifactAnnotation>& anns);

std::string annotation_to_json(const ArtifactAnnotation& ann);
ArtifactAnnotation annotation_from_json(const std::string& line);

}  // namespace caddm
