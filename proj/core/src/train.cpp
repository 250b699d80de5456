#include "caddm/train.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <unordered_map>

#include "caddm/errors.hpp"
#include "caddm/eval.hpp"
#include "caddm/parallel.hpp"
#include "caddm/png_io.hpp"
#include "json_util.hpp"

namespace caddm {

namespace fs = std::filesystem;
using nlohmann::json;

TrainConfig load_train_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("", "config parse error in " + path + ": " + e.what());
  }
  detail::strict_keys(j,
                      {"mode", "batch_size", "epochs", "steps_per_epoch", "lr_schedule",
                       "alpha", "beta", "adam_beta1", "adam_beta2", "adam_eps", "seed",
                       "jobs", "mfs", "augment", "network", "neg_pos_ratio",
                       "neg_cap_no_positives", "val_frames_per_group",
                       "train_annotations", "val_annotations"},
                      "");
  TrainConfig c;
  const std::string mode = detail::get_or<std::string>(j, "mode", "caddm", "");
  if (mode == "vbc")
    c.mode = TrainMode::vbc;
  else if (mode == "caddm")
    c.mode = TrainMode::caddm;
  else
    throw ConfigError("mode", "config: mode must be 'vbc' or 'caddm'");
  c.batch_size = detail::get_or(j, "batch_size", c.batch_size, "");
  c.epochs = detail::get_or(j, "epochs", c.epochs, "");
  c.steps_per_epoch = detail::get_or(j, "steps_per_epoch", c.steps_per_epoch, "");
  if (j.contains("lr_schedule")) {
    c.lr_schedule.clear();
    for (const auto& pt : j.at("lr_schedule")) {
      if (!pt.is_array() || pt.size() != 2)
        throw ConfigError("lr_schedule", "config: lr_schedule entries are [epoch, lr] pairs");
      c.lr_schedule.push_back({pt[0].get<int>(), pt[1].get<double>()});
    }
  }
  c.alpha = detail::get_or(j, "alpha", c.alpha, "");
  c.beta = detail::get_or(j, "beta", c.beta, "");
  c.adam_beta1 = detail::get_or(j, "adam_beta1", c.adam_beta1, "");
  c.adam_beta2 = detail::get_or(j, "adam_beta2", c.adam_beta2, "");
  c.adam_eps = detail::get_or(j, "adam_eps", c.adam_eps, "");
  c.seed = detail::get_or(j, "seed", c.seed, "");
  c.jobs = detail::get_or(j, "jobs", c.jobs, "");
  if (j.contains("mfs")) {
    c.mfs_enabled = detail::get_or(j.at("mfs"), "enabled", c.mfs_enabled, "mfs");
    c.mfs = detail::mfs_config_from_json(j.at("mfs"), "mfs");
  }
  if (j.contains("augment"))
    c.augment = detail::augment_config_from_json(j.at("augment"), "augment");
  if (j.contains("network"))
    c.network = detail::network_config_from_json(j.at("network"), "network");
  c.neg_pos_ratio = detail::get_or(j, "neg_pos_ratio", c.neg_pos_ratio, "");
  c.neg_cap_no_positives = detail::get_or(j, "neg_cap_no_positives", c.neg_cap_no_positives, "");
  c.val_frames_per_group = detail::get_or(j, "val_frames_per_group", c.val_frames_per_group, "");
  c.train_annotations = detail::get_or<std::string>(j, "train_annotations", "", "");
  c.val_annotations = detail::get_or<std::string>(j, "val_annotations", "", "");
  if (c.train_annotations.empty())
    throw ConfigError("train_annotations", "config: train_annotations is required");
  if (c.batch_size < 1 || c.epochs < 0 || c.steps_per_epoch < 1)
    throw ConfigError("batch_size", "config: counts must be positive");
  for (const auto& pt : c.lr_schedule)
    if (pt.lr <= 0) throw ConfigError("lr_schedule", "config: learning rates must be > 0");
  return c;
}

std::string train_config_to_json_string(const TrainConfig& c) {
  json sched = json::array();
  for (const auto& pt : c.lr_schedule) sched.push_back({pt.epoch, pt.lr});
  json m = detail::mfs_config_to_json(c.mfs);
  m["enabled"] = c.mfs_enabled;
  json j{{"mode", c.mode == TrainMode::vbc ? "vbc" : "caddm"},
         {"batch_size", c.batch_size},
         {"epochs", c.epochs},
         {"steps_per_epoch", c.steps_per_epoch},
         {"lr_schedule", sched},
         {"alpha", c.alpha},
         {"beta", c.beta},
         {"adam_beta1", c.adam_beta1},
         {"adam_beta2", c.adam_beta2},
         {"adam_eps", c.adam_eps},
         {"seed", c.seed},
         {"jobs", c.jobs},
         {"mfs", m},
         {"augment", detail::augment_config_to_json(c.augment)},
         {"network", detail::network_config_to_json(c.network)},
         {"neg_pos_ratio", c.neg_pos_ratio},
         {"neg_cap_no_positives", c.neg_cap_no_positives},
         {"val_frames_per_group", c.val_frames_per_group},
         {"train_annotations", c.train_annotations},
         {"val_annotations", c.val_annotations}};
  return j.dump(2);
}

namespace {

constexpr uint64_t kStreamBatch = 0xba7c40;
constexpr uint64_t kStreamSample = 0x5a391e;

inline uint64_t pack_step(int epoch, int step) {
  return (static_cast<uint64_t>(static_cast<uint32_t>(epoch)) << 32) |
         static_cast<uint32_t>(step);
}

// Compact 8-bit cache of decoded frames; PNG files are 8-bit anyway.
struct CachedImage {
  int h = 0, w = 0;
  std::vector<uint8_t> px;
};

CachedImage compress(const Image& img) {
  CachedImage c{img.height, img.width, {}};
  c.px.resize(img.data.size());
  for (size_t i = 0; i < img.data.size(); ++i) c.px[i] = to_byte(img.data[i]);
  return c;
}

Image decompress(const CachedImage& c) {
  Image img(c.h, c.w);
  for (size_t i = 0; i < c.px.size(); ++i) img.data[i] = from_byte(c.px[i]);
  return img;
}

}  // namespace

struct Trainer::Impl {
  TrainConfig cfg;
  Network net;
  Rng base;

  std::vector<ArtifactAnnotation> train_anns;
  std::unordered_map<std::string, CachedImage> cache;  // by resolved path
  DatasetStats stats;

  nn::AlignedVec adam_m, adam_v, master_grad;
  int64_t adam_t = 0;

  struct Slot {
    Network::Acts acts;
    nn::AlignedVec grad;
    LossBreakdown bd;
    std::string image_path;
  };
  std::vector<Slot> slots;

  int64_t steps_total = 0, steps_with_positive = 0;
  std::vector<std::string> last_batch_paths;

  explicit Impl(const TrainConfig& c) : cfg(c), net(c.network), base(c.seed) {
    net.init(c.seed);
    train_anns = read_annotations(cfg.train_annotations);
    if (train_anns.empty()) throw std::runtime_error("train: empty training annotation file");

    for (const auto& a : train_anns) {
      load(resolve_path(cfg.train_annotations, a.image_path));
      if (a.source_path) load(resolve_path(cfg.train_annotations, *a.source_path));
    }
    compute_stats();

    adam_m.assign(net.n_params(), 0.0);
    adam_v.assign(net.n_params(), 0.0);
    master_grad.assign(net.n_params(), 0.0);
    slots.resize(static_cast<size_t>(cfg.batch_size));
    for (auto& s : slots) s.grad.assign(net.n_params(), 0.0);
  }

  void load(const std::string& path) {
    if (cache.count(path)) return;
    cache.emplace(path, compress(read_png(path)));
  }

  Image image_at(const std::string& rel) const {
    return decompress(cache.at(resolve_path(cfg.train_annotations, rel)));
  }

  void compute_stats() {
    double sum[3] = {0, 0, 0}, sum2[3] = {0, 0, 0};
    size_t n = 0;
    for (const auto& a : train_anns) {
      const Image img = image_at(a.image_path);
      for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
          for (int c = 0; c < 3; ++c) {
            const double v = img.at(y, x, c);
            sum[c] += v;
            sum2[c] += v * v;
          }
      n += static_cast<size_t>(img.height) * img.width;
    }
    for (int c = 0; c < 3; ++c) {
      stats.mean[static_cast<size_t>(c)] = sum[c] / static_cast<double>(n);
      const double var = sum2[c] / static_cast<double>(n) -
                         stats.mean[static_cast<size_t>(c)] * stats.mean[static_cast<size_t>(c)];
      stats.stdev[static_cast<size_t>(c)] = std::sqrt(std::max(var, 1e-6));
    }
  }

  double lr_at(int epoch) const {
    double lr = cfg.lr_schedule.empty() ? 1e-3 : cfg.lr_schedule.front().lr;
    for (const auto& pt : cfg.lr_schedule)
      if (pt.epoch <= epoch) lr = pt.lr;
    return lr;
  }

  // Per-sample pipeline; every random draw comes from streams derived from
  // (seed, epoch, step, slot), so worker scheduling cannot change results.
  void run_slot(Slot& slot, const ArtifactAnnotation& ann, Rng sample_rng) {
    Image img = image_at(ann.image_path);
    int label = ann.fake ? 1 : 0;
    PixelBoxes boxes = ann.artifact_boxes;
    slot.image_path = ann.image_path;

    if (cfg.mfs_enabled && ann.fake && ann.source_path) {
      const Image src = image_at(*ann.source_path);
      Rng mfs_rng = sample_rng.derive(1);
      MfsOutcome mo = mfs_sample(img, src, cfg.mfs, mfs_rng);
      img = std::move(mo.image);
      label = mo.ann.fake ? 1 : 0;
      boxes = mo.ann.artifact_boxes;
    }
    if (cfg.augment.enabled) {
      Rng aug_rng = sample_rng.derive(2);
      AugmentResult ar = augment(img, boxes, cfg.augment, aug_rng);
      img = std::move(ar.image);
      boxes = std::move(ar.boxes);
    }

    ModelOutput out;
    net.forward(to_tensor(img, stats), slot.acts, out);

    const double inv_b = 1.0 / static_cast<double>(cfg.batch_size);
    std::array<double, 2> cls_grad;
    const double cls = classification_loss(out.image_logits, label, &cls_grad);

    OutputGrads og;
    og.image_logits = {cls_grad[0] * inv_b, cls_grad[1] * inv_b};

    std::fill(slot.grad.begin(), slot.grad.end(), 0.0);
    if (cfg.mode == TrainMode::caddm) {
      std::vector<BoxXYXY> gt;
      const double inv_size = 1.0 / cfg.network.input_size;
      for (const auto& b : boxes)
        gt.push_back({b[0] * inv_size, b[1] * inv_size, b[2] * inv_size, b[3] * inv_size});
      const DetectionTargets targets = match_anchors(net.anchors(), gt);

      std::vector<std::array<double, 2>> conf_grads;
      std::vector<std::array<double, 4>> loc_grads;
      const ConfidenceLoss conf = confidence_loss(out.anchor_logits, targets,
                                                  cfg.neg_pos_ratio, cfg.neg_cap_no_positives,
                                                  &conf_grads);
      const double loc = location_loss(out.anchor_offsets, targets, &loc_grads);
      slot.bd = total_loss(cls, conf.value, loc, targets.n_positives,
                           conf.n_mined_negatives, cfg.alpha, cfg.beta);

      const int denom = targets.n_positives >= 1 ? targets.n_positives
                                                 : std::max(conf.n_mined_negatives, 1);
      const double conf_scale = cfg.beta / denom * inv_b;
      og.anchor_logits.assign(out.anchor_logits.size(), {0, 0});
      for (size_t i = 0; i < conf_grads.size(); ++i) {
        og.anchor_logits[i][0] = conf_grads[i][0] * conf_scale;
        og.anchor_logits[i][1] = conf_grads[i][1] * conf_scale;
      }
      og.anchor_offsets.assign(out.anchor_offsets.size(), {0, 0, 0, 0});
      if (targets.n_positives >= 1) {
        const double loc_scale = cfg.beta * cfg.alpha / targets.n_positives * inv_b;
        for (size_t i = 0; i < loc_grads.size(); ++i)
          for (size_t m = 0; m < 4; ++m)
            og.anchor_offsets[i][m] = loc_grads[i][m] * loc_scale;
      }
      net.backward(slot.acts, og, slot.grad.data(), /*include_heads=*/true);
    } else {
      slot.bd = LossBreakdown{cls, cls, 0, 0, 0, 0};
      net.backward(slot.acts, og, slot.grad.data(), /*include_heads=*/false);
    }
  }

  LossBreakdown step(int epoch, int step_in_epoch) {
    const uint64_t tick = pack_step(epoch, step_in_epoch);
    Rng batch_rng = base.derive(kStreamBatch, tick);
    std::vector<size_t> idx(static_cast<size_t>(cfg.batch_size));
    for (auto& i : idx)
      i = static_cast<size_t>(batch_rng.uniform_int(0, static_cast<int64_t>(train_anns.size()) - 1));

    last_batch_paths.clear();
    for (size_t s = 0; s < idx.size(); ++s)
      last_batch_paths.push_back(train_anns[idx[s]].image_path);

    parallel_for(idx.size(), cfg.jobs, [&](size_t s) {
      run_slot(slots[s], train_anns[idx[s]], base.derive(kStreamSample, tick, s));
    });

    // Fixed-order reduction keeps results identical for any worker count.
    std::fill(master_grad.begin(), master_grad.end(), 0.0);
    LossBreakdown bd;
    for (size_t s = 0; s < slots.size(); ++s) {
      const auto& g = slots[s].grad;
      for (size_t k = 0; k < master_grad.size(); ++k) master_grad[k] += g[k];
      bd.total += slots[s].bd.total;
      bd.cls += slots[s].bd.cls;
      bd.conf += slots[s].bd.conf;
      bd.loc += slots[s].bd.loc;
      bd.det += slots[s].bd.det;
      bd.n_positives += slots[s].bd.n_positives;
    }
    const double inv_b = 1.0 / static_cast<double>(cfg.batch_size);
    bd.total *= inv_b;
    bd.cls *= inv_b;
    bd.conf *= inv_b;
    bd.loc *= inv_b;
    bd.det *= inv_b;

    // Adaptive-moment update.
    ++adam_t;
    const double lr = lr_at(epoch);
    const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(adam_t));
    const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(adam_t));
    auto& p = net.params();
    for (size_t k = 0; k < p.size(); ++k) {
      const double g = master_grad[k];
      adam_m[k] = cfg.adam_beta1 * adam_m[k] + (1.0 - cfg.adam_beta1) * g;
      adam_v[k] = cfg.adam_beta2 * adam_v[k] + (1.0 - cfg.adam_beta2) * g * g;
      p[k] -= lr * (adam_m[k] / bc1) / (std::sqrt(adam_v[k] / bc2) + cfg.adam_eps);
    }

    ++steps_total;
    if (bd.n_positives > 0) ++steps_with_positive;
    return bd;
  }

  TrainResult run(const std::string& out_dir) {
    fs::create_directories(out_dir);
    TrainResult res;
    res.stats = stats;
    res.log_path = (fs::path(out_dir) / "train_log.jsonl").string();
    res.final_checkpoint = (fs::path(out_dir) / "checkpoint_final.ckpt").string();
    res.best_checkpoint = (fs::path(out_dir) / "checkpoint_best.ckpt").string();
    std::ofstream log(res.log_path, std::ios::trunc);
    if (!log) throw std::runtime_error("train: cannot open log " + res.log_path);

    std::vector<ArtifactAnnotation> val_anns;
    if (!cfg.val_annotations.empty()) val_anns = read_annotations(cfg.val_annotations);

    bool best_saved = false;
    for (int e = 0; e < cfg.epochs; ++e) {
      for (int s = 0; s < cfg.steps_per_epoch; ++s) {
        const LossBreakdown bd = step(e, s);
        if (!std::isfinite(bd.total)) {
          json dump{{"epoch", e}, {"step", s}, {"batch_image_paths", last_batch_paths}};
          std::ofstream d((fs::path(out_dir) / "nan_dump.json").string(), std::ios::trunc);
          d << dump.dump(2) << '\n';
          throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(e) +
                                   " step " + std::to_string(s) +
                                   "; offending batch written to nan_dump.json");
        }
        log << json{{"epoch", e},         {"step", s},   {"total", bd.total},
                    {"cls", bd.cls},      {"conf", bd.conf}, {"loc", bd.loc},
                    {"det", bd.det},      {"n_pos", bd.n_positives},
                    {"lr", lr_at(e)}}
                   .dump()
            << '\n';
      }
      if (!val_anns.empty()) {
        ScoreOptions so;
        so.jobs = cfg.jobs;
        const auto sr = score_annotations(net, stats, val_anns, cfg.val_annotations, so);
        const auto auc = roc_auc(sr.records);
        const double v = auc.value_or(-1.0);
        log << json{{"epoch", e}, {"val_frame_auc", auc ? json(v) : json()}}.dump() << '\n';
        if (auc && v > res.best_val_frame_auc) {
          res.best_val_frame_auc = v;
          save_checkpoint(res.best_checkpoint, net, stats, cfg.seed);
          best_saved = true;
        }
      }
      log.flush();
    }

    save_checkpoint(res.final_checkpoint, net, stats, cfg.seed);
    if (!best_saved) save_checkpoint(res.best_checkpoint, net, stats, cfg.seed);
    return res;
  }
};

Trainer::Trainer(const TrainConfig& cfg) : impl_(std::make_unique<Impl>(cfg)) {}
Trainer::~Trainer() = default;

LossBreakdown Trainer::step(int epoch, int step_in_epoch) {
  return impl_->step(epoch, step_in_epoch);
}

TrainResult Trainer::run(const std::string& out_dir) { return impl_->run(out_dir); }

Network& Trainer::network() { return impl_->net; }
const Network& Trainer::network() const { return impl_->net; }
const DatasetStats& Trainer::stats() const { return impl_->stats; }
const nn::AlignedVec& Trainer::last_gradient() const { return impl_->master_grad; }

double Trainer::last_batch_positive_fraction() const {
  return impl_->steps_total == 0
             ? 0.0
             : static_cast<double>(impl_->steps_with_positive) /
                   static_cast<double>(impl_->steps_total);
}

TrainResult train(const TrainConfig& cfg, const std::string& out_dir) {
  Trainer t(cfg);
  return t.run(out_dir);
}

}  // namespace caddm
