#include "caddm/annotation.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace caddm {

using nlohmann::json;

void ArtifactAnnotation::validate(int image_h, int image_w) const {
  if (!fake && !artifact_boxes.empty())
    throw std::invalid_argument("annotation: genuine record with artifact boxes: " + image_path);
  for (const auto& b : artifact_boxes) {
    if (b[2] <= b[0] || b[3] <= b[1] || b[0] < 0 || b[1] < 0 || b[2] > image_w || b[3] > image_h)
      throw std::invalid_argument("annotation: box outside image or degenerate: " + image_path);
  }
}

std::string annotation_to_json(const ArtifactAnnotation& ann) {
  json j;
  j["image_path"] = ann.image_path;
  j["label"] = ann.fake ? "fake" : "genuine";
  j["identity"] = ann.identity;
  if (ann.source_path) j["source_path"] = *ann.source_path;
  j["artifact_boxes"] = ann.artifact_boxes;
  if (!ann.group_id.empty()) j["group_id"] = ann.group_id;
  return j.dump();
}

ArtifactAnnotation annotation_from_json(const std::string& line) {
  const json j = json::parse(line);
  ArtifactAnnotation ann;
  ann.image_path = j.at("image_path").get<std::string>();
  const std::string label = j.at("label").get<std::string>();
  if (label != "fake" && label != "genuine")
    throw std::invalid_argument("annotation: label must be 'fake' or 'genuine'");
  ann.fake = label == "fake";
  ann.identity = j.value("identity", std::string());
  if (j.contains("source_path")) ann.source_path = j.at("source_path").get<std::string>();
  if (j.contains("artifact_boxes"))
    ann.artifact_boxes = j.at("artifact_boxes").get<std::vector<std::array<int, 4>>>();
  ann.group_id = j.value("group_id", std::string());
  return ann;
}

std::vector<ArtifactAnnotation> read_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_annotations: cannot open " + path);
  std::vector<ArtifactAnnotation> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(annotation_from_json(line));
    } catch (const std::exception& e) {
      throw std::runtime_error("read_annotations: " + path + ":" + std::to_string(lineno) +
                               ": " + e.what());
    }
  }
  return out;
}

void write_annotations(const std::string& path, const std::vector<ArtifactAnnotation>& anns) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("write_annotations: cannot open " + path);
  for (const auto& a : anns) out << annotation_to_json(a) << '\n';
}

}  // namespace caddm
