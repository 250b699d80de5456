#include "caddm/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace caddm {

using nlohmann::json;

std::optional<double> roc_auc(const std::vector<EvalRecord>& records) {
  size_t pos = 0, neg = 0;
  for (const auto& r : records) (r.label == 1 ? pos : neg) += 1;
  if (pos == 0 || neg == 0) return std::nullopt;

  std::vector<size_t> order(records.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return records[a].score < records[b].score; });

  // Midranks over tie groups; 1-based ranks.
  double rank_sum_pos = 0.0;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j < order.size() && records[order[j]].score == records[order[i]].score) ++j;
    const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (size_t k = i; k < j; ++k)
      if (records[order[k]].label == 1) rank_sum_pos += midrank;
    i = j;
  }
  const double p = static_cast<double>(pos), n = static_cast<double>(neg);
  return (rank_sum_pos - p * (p + 1) / 2.0) / (p * n);
}

double accuracy(const std::vector<EvalRecord>& records, double threshold) {
  if (records.empty()) return 0.0;
  size_t correct = 0;
  for (const auto& r : records)
    if ((r.score >= threshold ? 1 : 0) == r.label) ++correct;
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

std::vector<EvalRecord> video_level_scores(const std::vector<EvalRecord>& records,
                                           int frames_per_group) {
  if (frames_per_group < 1)
    throw std::invalid_argument("video_level_scores: frames_per_group must be positive");
  std::vector<std::string> group_order;
  std::map<std::string, std::vector<const EvalRecord*>> groups;
  for (const auto& r : records) {
    auto [it, inserted] = groups.try_emplace(r.group);
    if (inserted) group_order.push_back(r.group);
    it->second.push_back(&r);
  }

  std::vector<EvalRecord> out;
  for (const auto& g : group_order) {
    const auto& frames = groups[g];
    const int label = frames.front()->label;
    for (const auto* f : frames)
      if (f->label != label)
        throw std::invalid_argument("video_level_scores: mixed labels in group '" + g + "'");
    const size_t n = frames.size();
    const size_t k = std::min<size_t>(static_cast<size_t>(frames_per_group), n);
    double sum = 0.0;
    for (size_t t = 0; t < k; ++t) sum += frames[t * n / k]->score;
    out.push_back({sum / static_cast<double>(k), label, g});
  }
  return out;
}

MetricsReport compute_metrics(const std::vector<EvalRecord>& records, int frames_per_group) {
  MetricsReport m;
  m.n = records.size();
  m.acc = accuracy(records);
  m.frame_auc = roc_auc(records);
  bool has_groups = !records.empty();
  for (const auto& r : records)
    if (r.group.empty()) has_groups = false;
  if (has_groups) m.video_auc = roc_auc(video_level_scores(records, frames_per_group));
  return m;
}

std::vector<EvalRecord> read_eval_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_eval_records: cannot open " + path);
  std::vector<EvalRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    EvalRecord r;
    r.score = j.at("score").get<double>();
    r.label = j.at("label").get<int>();
    r.group = j.value("group_id", std::string());
    if (!(r.score >= 0.0 && r.score <= 1.0))
      throw std::runtime_error("read_eval_records: score outside [0,1] in " + path);
    if (r.label != 0 && r.label != 1)
      throw std::runtime_error("read_eval_records: label must be 0 or 1 in " + path);
    out.push_back(std::move(r));
  }
  return out;
}

void write_eval_records(const std::string& path, const std::vector<EvalRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("write_eval_records: cannot open " + path);
  for (const auto& r : records) {
    json j{{"score", r.score}, {"label", r.label}};
    if (!r.group.empty()) j["group_id"] = r.group;
    out << j.dump() << '\n';
  }
}

}  // namespace caddm
