// Command-line front end: dataset generation, facial-swap synthesis,
// training, evaluation, identity-leakage diagnostics and box visualization.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "caddm/annotation.hpp"
#include "caddm/checkpoint.hpp"
#include "caddm/errors.hpp"
#include "caddm/eval.hpp"
#include "caddm/hash.hpp"
#include "caddm/iil.hpp"
#include "caddm/metrics.hpp"
#include "caddm/mfs.hpp"
#include "caddm/parallel.hpp"
#include "caddm/png_io.hpp"
#include "caddm/procgen.hpp"
#include "caddm/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace caddm;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_config(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("", "config parse error in " + path + ": " + e.what());
  }
}

struct ManifestInfo {
  std::string command;
  std::string config_hash;
  uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
};

// Written only on success, atomically; a failed run leaves no manifest.
void write_manifest(const std::string& out_dir, const ManifestInfo& m) {
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - m.t0).count();
  json j{{"command", m.command},   {"config_hash", m.config_hash},
         {"seed", m.seed},         {"inputs", m.inputs},
         {"outputs", m.outputs},   {"tool_version", kVersion},
         {"wall_clock_sec", wall}};
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  const fs::path tmp = dir / ".run_manifest.tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write manifest in " + out_dir);
  }
  fs::rename(tmp, dir / "run_manifest.json");
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

// Strict-key helpers live in the core's internal JSON utilities; the CLI
// repeats the tiny pattern here for its own config blocks.
static void strict_keys_cli(const json& j, const std::set<std::string>& allowed,
                            const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "config: '" + path + "' must be an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) {
      const std::string full = path.empty() ? key : path + "." + key;
      throw ConfigError(full, "config: unknown key '" + full + "'");
    }
}

template <typename T>
static T jget(const json& j, const std::string& key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(key, "config: bad value type for '" + key + "'");
  }
}

static MfsConfig mfs_config_from_cli_json(const json& j) {
  strict_keys_cli(j, {"p_global", "scale_buckets", "p_poisson", "global_axis_range",
                      "global_sigma_range"},
                  "");
  MfsConfig m;
  m.p_global = jget(j, "p_global", m.p_global);
  m.scale_buckets = jget(j, "scale_buckets", m.scale_buckets);
  m.p_poisson = jget(j, "p_poisson", m.p_poisson);
  const auto ax = jget(j, "global_axis_range",
                       std::array<double, 2>{m.global_axis_lo, m.global_axis_hi});
  const auto sg = jget(j, "global_sigma_range",
                       std::array<double, 2>{m.global_sigma_lo, m.global_sigma_hi});
  m.global_axis_lo = ax[0];
  m.global_axis_hi = ax[1];
  m.global_sigma_lo = sg[0];
  m.global_sigma_hi = sg[1];
  return m;
}

static int cmd_procgen(const std::string& config_path, const std::string& out_dir,
                       std::optional<uint64_t> seed_flag) {
  ManifestInfo mi;
  mi.command = "procgen";
  const std::string raw = read_file(config_path);
  mi.config_hash = hex64(fnv1a64(raw));
  mi.inputs = {config_path};

  const json j = json::parse(raw);
  strict_keys_cli(j, {"n_identities", "frames_per_video", "train_videos_per_id",
                      "val_videos_per_id", "test_videos_per_id", "methods_in_train",
                      "methods_in_test", "identity_disjoint_eval", "seed"},
                  "");
  ProcgenConfig c;
  c.n_identities = jget(j, "n_identities", c.n_identities);
  c.frames_per_video = jget(j, "frames_per_video", c.frames_per_video);
  c.train_videos_per_id = jget(j, "train_videos_per_id", c.train_videos_per_id);
  c.val_videos_per_id = jget(j, "val_videos_per_id", c.val_videos_per_id);
  c.test_videos_per_id = jget(j, "test_videos_per_id", c.test_videos_per_id);
  c.methods_in_train = jget(j, "methods_in_train", c.methods_in_train);
  c.methods_in_test = jget(j, "methods_in_test", c.methods_in_test);
  c.identity_disjoint_eval = jget(j, "identity_disjoint_eval", c.identity_disjoint_eval);
  c.seed = jget(j, "seed", c.seed);
  if (seed_flag) c.seed = *seed_flag;
  c.out_dir = out_dir;
  mi.seed = c.seed;

  try {
    const ProcgenSummary s = build_dataset(c);
    for (const auto& [split, n] : s.counts)
      std::cout << "procgen: " << split << ": " << n[0] << " genuine, " << n[1]
                << " fake frames\n";
    if (s.cross_method_test_empty)
      std::cout << "procgen: cross-method test split is empty (all methods in train)\n";
    mi.outputs = s.annotation_files;
    mi.outputs.push_back(s.manifest_path);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("", e.what());
  }
  write_manifest(out_dir, mi);
  return 0;
}

static int cmd_mfs(const std::string& ann_path, const std::string& out_dir,
                   const std::string& config_path, uint64_t seed, int jobs) {
  ManifestInfo mi;
  mi.command = "mfs";
  mi.seed = seed;
  mi.inputs = {ann_path};
  MfsConfig cfg;
  if (!config_path.empty()) {
    const std::string raw = read_file(config_path);
    mi.config_hash = hex64(fnv1a64(raw));
    mi.inputs.push_back(config_path);
    cfg = mfs_config_from_cli_json(json::parse(raw));
  } else {
    mi.config_hash = hex64(fnv1a64(std::string("builtin-defaults")));
  }

  const auto anns = read_annotations(ann_path);
  fs::create_directories(fs::path(out_dir) / "images");

  struct RowOut {
    ArtifactAnnotation ann;
    bool skipped = false;
    bool passthrough = false;
    bool global = false;
    int bucket = -1;
    BlendKind blend = BlendKind::alpha;
    bool fallback = false;
  };
  std::vector<RowOut> rows(anns.size());

  parallel_for(anns.size(), jobs, [&](size_t i) {
    RowOut& row = rows[i];
    const ArtifactAnnotation& a = anns[i];
    const std::string img_abs = resolve_path(ann_path, a.image_path);
    if (!a.fake || !a.source_path) {
      row.ann = a;
      row.ann.image_path = fs::relative(img_abs, out_dir).string();
      if (row.ann.source_path)
        row.ann.source_path =
            fs::relative(resolve_path(ann_path, *a.source_path), out_dir).string();
      row.passthrough = true;
      return;
    }
    const std::string src_abs = resolve_path(ann_path, *a.source_path);
    if (!fs::exists(img_abs) || !fs::exists(src_abs)) {
      std::cerr << "mfs: warning: skipping record " << i << " (unresolvable pair "
                << a.image_path << " / " << *a.source_path << ")\n";
      row.skipped = true;
      return;
    }
    const Image fake = read_png(img_abs);
    const Image source = read_png(src_abs);
    Rng rng(seed + i);  // per-sample stream
    MfsOutcome mo = mfs_sample(fake, source, cfg, rng);

    char name[64];
    std::snprintf(name, sizeof(name), "mfs_%06zu.png", i);
    const std::string rel = std::string("images/") + name;
    write_png((fs::path(out_dir) / rel).string(), mo.image);

    row.ann = a;
    row.ann.image_path = rel;
    row.ann.fake = mo.ann.fake;
    row.ann.artifact_boxes = mo.ann.artifact_boxes;
    row.ann.source_path = fs::relative(src_abs, out_dir).string();
    row.global = mo.global;
    row.bucket = mo.bucket;
    row.blend = mo.blend;
    row.fallback = mo.poisson_fallback;
  });

  std::vector<ArtifactAnnotation> out_anns;
  size_t skipped = 0, passthrough = 0, global_n = 0, alpha_n = 0, poisson_n = 0, fallback_n = 0;
  std::vector<size_t> bucket_counts(cfg.scale_buckets.size(), 0);
  for (const auto& row : rows) {
    if (row.skipped) {
      ++skipped;
      continue;
    }
    out_anns.push_back(row.ann);
    if (row.passthrough) {
      ++passthrough;
      continue;
    }
    if (row.global && row.bucket < 0) ++global_n;
    if (row.bucket >= 0) ++bucket_counts[static_cast<size_t>(row.bucket)];
    if (row.blend == BlendKind::poisson)
      ++poisson_n;
    else
      ++alpha_n;
    if (row.fallback) ++fallback_n;
  }
  const std::string out_ann = (fs::path(out_dir) / "annotations.jsonl").string();
  write_annotations(out_ann, out_anns);

  std::cout << "mfs: " << (rows.size() - skipped - passthrough) << " swapped, " << passthrough
            << " passthrough, " << skipped << " skipped; global " << global_n << "; buckets";
  for (size_t b = 0; b < bucket_counts.size(); ++b)
    std::cout << " [" << cfg.scale_buckets[b][0] << "," << cfg.scale_buckets[b][1]
              << "]=" << bucket_counts[b];
  std::cout << "; blend alpha " << alpha_n << " poisson " << poisson_n << " (fallback "
            << fallback_n << ")\n";

  mi.outputs = {out_ann};
  write_manifest(out_dir, mi);
  return 0;
}

static int cmd_train(const std::string& config_path, const std::string& out_dir,
                     std::optional<uint64_t> seed_flag, std::optional<int> jobs_flag) {
  ManifestInfo mi;
  mi.command = "train";
  const std::string raw = read_file(config_path);
  mi.config_hash = hex64(fnv1a64(raw));
  mi.inputs = {config_path};

  TrainConfig cfg = load_train_config(config_path);
  if (seed_flag) cfg.seed = *seed_flag;
  if (jobs_flag) cfg.jobs = *jobs_flag;
  mi.seed = cfg.seed;
  mi.inputs.push_back(cfg.train_annotations);
  if (!cfg.val_annotations.empty()) mi.inputs.push_back(cfg.val_annotations);

  const TrainResult res = train(cfg, out_dir);
  std::cout << "train: final checkpoint " << res.final_checkpoint << "\n";
  std::cout << "train: best checkpoint " << res.best_checkpoint;
  if (res.best_val_frame_auc >= 0) std::cout << " (val frame AUC " << res.best_val_frame_auc << ")";
  std::cout << "\n";
  mi.outputs = {res.final_checkpoint, res.best_checkpoint, res.log_path};
  write_manifest(out_dir, mi);
  return 0;
}

static int cmd_eval(const std::string& checkpoint, const std::string& ann_path,
                    const std::string& scores_path, const std::string& out_dir,
                    const std::string& features_out, int frames_per_group, int jobs,
                    uint64_t seed) {
  ManifestInfo mi;
  mi.command = "eval";
  mi.seed = seed;
  fs::create_directories(out_dir);

  std::vector<EvalRecord> records;
  if (!scores_path.empty()) {
    mi.inputs = {scores_path};
    mi.config_hash = hex64(fnv1a64(scores_path));
    records = read_eval_records(scores_path);
  } else {
    if (checkpoint.empty() || ann_path.empty())
      throw ConfigError("checkpoint",
                        "eval needs either --scores or both --checkpoint and --annotations");
    mi.inputs = {checkpoint, ann_path};
    mi.config_hash = hex64(fnv1a64(checkpoint + "|" + ann_path));
    const Checkpoint ckpt = load_checkpoint(checkpoint);
    const Network net = network_from_checkpoint(ckpt);
    const auto anns = read_annotations(ann_path);
    ScoreOptions so;
    so.jobs = jobs;
    so.collect_features = !features_out.empty();
    const ScoreResult sr = score_annotations(net, ckpt.stats, anns, ann_path, so);
    records = sr.records;
    const std::string sp = (fs::path(out_dir) / "scores.jsonl").string();
    write_eval_records(sp, records);
    mi.outputs.push_back(sp);
    if (!features_out.empty()) {
      write_feature_records(features_out, sr.features);
      mi.outputs.push_back(features_out);
    }
  }

  const MetricsReport m = compute_metrics(records, frames_per_group);
  json j{{"acc", m.acc},
         {"frame_auc", m.frame_auc ? json(*m.frame_auc) : json()},
         {"video_auc", m.video_auc ? json(*m.video_auc) : json()},
         {"n", m.n}};
  const std::string mp = (fs::path(out_dir) / "metrics.json").string();
  {
    std::ofstream out(mp, std::ios::trunc);
    out << j.dump(2) << '\n';
  }
  std::cout << "eval: " << j.dump() << "\n";
  if (!m.frame_auc)
    std::cout << "eval: AUC undefined (single-class input)\n";
  mi.outputs.push_back(mp);
  write_manifest(out_dir, mi);
  return 0;
}

static int cmd_iil(const std::string& features_path, const std::string& checkpoint,
                   const std::string& ann_path, const std::string& out_dir,
                   const std::string& thresholds_csv, int samples_per_id, int probe_epochs,
                   double probe_lr, double probe_train_fraction, bool genuine_only,
                   uint64_t seed, int jobs) {
  ManifestInfo mi;
  mi.command = "iil";
  mi.seed = seed;
  fs::create_directories(out_dir);

  std::vector<FeatureRecord> feats;
  if (!features_path.empty()) {
    mi.inputs = {features_path};
    mi.config_hash = hex64(fnv1a64(features_path));
    feats = read_feature_records(features_path);
  } else {
    if (checkpoint.empty() || ann_path.empty())
      throw ConfigError("features",
                        "iil needs either --features or both --checkpoint and --annotations");
    mi.inputs = {checkpoint, ann_path};
    mi.config_hash = hex64(fnv1a64(checkpoint + "|" + ann_path));
    const Checkpoint ckpt = load_checkpoint(checkpoint);
    const Network net = network_from_checkpoint(ckpt);
    const auto anns = read_annotations(ann_path);
    ScoreOptions so;
    so.jobs = jobs;
    so.collect_features = true;
    feats = score_annotations(net, ckpt.stats, anns, ann_path, so).features;
    const std::string fp = (fs::path(out_dir) / "features.jsonl").string();
    write_feature_records(fp, feats);
    mi.outputs.push_back(fp);
  }

  std::vector<double> thresholds;
  {
    std::stringstream ss(thresholds_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) thresholds.push_back(std::stod(tok));
    if (thresholds.empty()) throw ConfigError("thresholds", "no overlap thresholds given");
  }

  const auto sampled = sample_per_identity(feats, samples_per_id);
  std::vector<OverlapDistribution> overlaps;
  ProbeResult probe;
  try {
    overlaps = id_overlap(sampled, thresholds, genuine_only);
    probe = id_linear_probe(feats, probe_train_fraction, probe_epochs, probe_lr, seed);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("", e.what());
  }

  json jov = json::array();
  for (const auto& d : overlaps)
    jov.push_back({{"threshold", d.threshold},
                   {"counts", d.counts},
                   {"min", d.min},
                   {"q1", d.q1},
                   {"median", d.median},
                   {"q3", d.q3},
                   {"max", d.max}});
  json j{{"overlap", jov},
         {"probe",
          {{"train_loss", probe.train_loss},
           {"heldout_acc", probe.heldout_acc},
           {"final_heldout_acc", probe.heldout_acc.empty() ? 0.0 : probe.heldout_acc.back()},
           {"n_classes", probe.n_classes},
           {"n_train", probe.n_train},
           {"n_heldout", probe.n_heldout}}}};
  const std::string rp = (fs::path(out_dir) / "iil_report.json").string();
  {
    std::ofstream out(rp, std::ios::trunc);
    out << j.dump(2) << '\n';
  }
  std::cout << "iil: probe final held-out accuracy "
            << (probe.heldout_acc.empty() ? 0.0 : probe.heldout_acc.back()) << " over "
            << probe.n_classes << " identities\n";
  for (const auto& d : overlaps)
    std::cout << "iil: overlap t=" << d.threshold << " median " << d.median << "\n";
  mi.outputs.push_back(rp);
  write_manifest(out_dir, mi);
  return 0;
}

static int cmd_viz(const std::string& checkpoint, const std::string& ann_path,
                   const std::string& out_dir, double score_threshold, double nms_iou,
                   int limit, int jobs) {
  ManifestInfo mi;
  mi.command = "viz";
  mi.inputs = {checkpoint, ann_path};
  mi.config_hash = hex64(fnv1a64(checkpoint + "|" + ann_path));
  fs::create_directories(out_dir);

  const Checkpoint ckpt = load_checkpoint(checkpoint);
  const Network net = network_from_checkpoint(ckpt);
  auto anns = read_annotations(ann_path);
  if (limit > 0 && anns.size() > static_cast<size_t>(limit))
    anns.resize(static_cast<size_t>(limit));

  std::vector<std::string> outs(anns.size());
  std::vector<int> drawn(anns.size(), 0);
  parallel_for(anns.size(), jobs, [&](size_t i) {
    const Image img = read_png(resolve_path(ann_path, anns[i].image_path));
    Network::Acts acts;
    ModelOutput out;
    net.forward(to_tensor(img, ckpt.stats), acts, out);
    Image canvas = img;
    const auto det = top_detection(net, out, nms_iou, score_threshold);
    if (det) {
      const int size = net.config().input_size;
      draw_box(canvas, static_cast<int>(std::lround(det->box.x0 * size)),
               static_cast<int>(std::lround(det->box.y0 * size)),
               static_cast<int>(std::lround(det->box.x1 * size)),
               static_cast<int>(std::lround(det->box.y1 * size)), {1.0, 0.1, 0.1}, 2);
      drawn[i] = 1;
    }
    char name[64];
    std::snprintf(name, sizeof(name), "viz_%06zu.png", i);
    outs[i] = (fs::path(out_dir) / name).string();
    write_png(outs[i], canvas);
  });

  size_t boxes = 0;
  for (int d : drawn) boxes += static_cast<size_t>(d);
  std::cout << "viz: wrote " << outs.size() << " images, " << boxes << " with a drawn box\n";
  mi.outputs = outs;
  write_manifest(out_dir, mi);
  return 0;
}

int main(int argc, char** argv) {
  CLI::App app{"Deepfake-detection pipeline: synthetic forgeries with artifact boxes, an "
               "anchor-based artifact detector, and identity-leakage diagnostics"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // procgen
  auto* pg = app.add_subcommand("procgen", "Generate the procedural face dataset");
  std::string pg_config, pg_out;
  std::optional<uint64_t> pg_seed;
  pg->add_option("--config", pg_config, "Dataset config (JSON)")->required();
  pg->add_option("--out", pg_out, "Output directory")->required();
  pg->add_option("--seed", pg_seed, "Override the config seed");

  // mfs
  auto* mf = app.add_subcommand("mfs", "Re-splice fake/source pairs at multiple scales");
  std::string mf_ann, mf_out, mf_config;
  uint64_t mf_seed = 0;
  int mf_jobs = 1;
  mf->add_option("--annotations", mf_ann, "Input annotation JSONL")->required();
  mf->add_option("--out", mf_out, "Output directory")->required();
  mf->add_option("--config", mf_config, "Swap config (JSON)");
  mf->add_option("--seed", mf_seed, "Base seed");
  mf->add_option("--jobs", mf_jobs, "Worker threads");

  // train
  auto* tr = app.add_subcommand("train", "Train a detector");
  std::string tr_config, tr_out;
  std::optional<uint64_t> tr_seed;
  std::optional<int> tr_jobs;
  tr->add_option("--config", tr_config, "Run config (JSON)")->required();
  tr->add_option("--out", tr_out, "Output directory")->required();
  tr->add_option("--seed", tr_seed, "Override the config seed");
  tr->add_option("--jobs", tr_jobs, "Override worker threads");

  // eval
  auto* ev = app.add_subcommand("eval", "Score images and compute metrics");
  std::string ev_ckpt, ev_ann, ev_scores, ev_out, ev_features;
  int ev_frames = 32, ev_jobs = 1;
  uint64_t ev_seed = 0;
  ev->add_option("--checkpoint", ev_ckpt, "Model checkpoint");
  ev->add_option("--annotations", ev_ann, "Annotation JSONL to score");
  ev->add_option("--scores", ev_scores, "Precomputed score JSONL (skips the model)");
  ev->add_option("--out", ev_out, "Output directory")->required();
  ev->add_option("--features", ev_features, "Also dump pre-classifier features here");
  ev->add_option("--frames-per-group", ev_frames, "Frames per pseudo-video");
  ev->add_option("--jobs", ev_jobs, "Worker threads");
  ev->add_option("--seed", ev_seed, "Recorded in the manifest");

  // iil
  auto* il = app.add_subcommand("iil", "Identity-leakage diagnostics");
  std::string il_features, il_ckpt, il_ann, il_out;
  std::string il_thresholds = "0.05,0.1,0.2,0.3,0.5";
  int il_samples = 5, il_epochs = 200, il_jobs = 1;
  double il_lr = 0.1, il_fraction = 0.8;
  bool il_genuine_only = false;
  uint64_t il_seed = 0;
  il->add_option("--features", il_features, "Feature dump JSONL");
  il->add_option("--checkpoint", il_ckpt, "Model checkpoint (extract features)");
  il->add_option("--annotations", il_ann, "Annotations for feature extraction");
  il->add_option("--out", il_out, "Output directory")->required();
  il->add_option("--thresholds", il_thresholds, "Overlap IoU thresholds, comma separated");
  il->add_option("--samples-per-id", il_samples, "Equal-interval samples per identity");
  il->add_option("--probe-epochs", il_epochs, "Probe epochs");
  il->add_option("--probe-lr", il_lr, "Probe learning rate");
  il->add_option("--probe-train-fraction", il_fraction, "Probe train split fraction");
  il->add_flag("--genuine-only", il_genuine_only, "Use only genuine records for overlap");
  il->add_option("--seed", il_seed, "Probe split seed");
  il->add_option("--jobs", il_jobs, "Worker threads");

  // viz
  auto* vz = app.add_subcommand("viz", "Draw the best detection box per image");
  std::string vz_ckpt, vz_ann, vz_out;
  double vz_thr = 0.5, vz_nms = 0.5;
  int vz_limit = 0, vz_jobs = 1;
  vz->add_option("--checkpoint", vz_ckpt, "Model checkpoint")->required();
  vz->add_option("--annotations", vz_ann, "Annotation JSONL")->required();
  vz->add_option("--out", vz_out, "Output directory")->required();
  vz->add_option("--score-threshold", vz_thr, "Minimum score to draw a box");
  vz->add_option("--nms-iou", vz_nms, "Suppression IoU threshold");
  vz->add_option("--limit", vz_limit, "Process at most this many records (0 = all)");
  vz->add_option("--jobs", vz_jobs, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (pg->parsed()) return guarded([&] { return cmd_procgen(pg_config, pg_out, pg_seed); });
  if (mf->parsed())
    return guarded([&] { return cmd_mfs(mf_ann, mf_out, mf_config, mf_seed, mf_jobs); });
  if (tr->parsed()) return guarded([&] { return cmd_train(tr_config, tr_out, tr_seed, tr_jobs); });
  if (ev->parsed())
    return guarded([&] {
      return cmd_eval(ev_ckpt, ev_ann, ev_scores, ev_out, ev_features, ev_frames, ev_jobs,
                      ev_seed);
    });
  if (il->parsed())
    return guarded([&] {
      return cmd_iil(il_features, il_ckpt, il_ann, il_out, il_thresholds, il_samples,
                     il_epochs, il_lr, il_fraction, il_genuine_only, il_seed, il_jobs);
    });
  if (vz->parsed())
    return guarded([&] {
      return cmd_viz(vz_ckpt, vz_ann, vz_out, vz_thr, vz_nms, vz_limit, vz_jobs);
    });
  return 2;
}
