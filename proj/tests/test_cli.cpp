#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "caddm/annotation.hpp"
#include "caddm/hash.hpp"
#include "caddm/metrics.hpp"

using namespace caddm;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* cli = CADDM_CLI_PATH;

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / "caddm_cli_out.txt";
  const std::string cmd = std::string(cli) + " " + args + " > " + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  std::ifstream in(log);
  r.output.assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  return p;
}

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p);
  out << text;
}

// Dataset content hash; the run manifest carries wall-clock time and is
// excluded on purpose.
uint64_t dataset_hash(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().filename() != "run_manifest.json")
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    h = fnv1a64(fs::relative(f, root).string(), h);
    h = fnv1a64(bytes, h);
  }
  return h;
}

const std::string kProcgenConfig = R"({
  "n_identities": 8,
  "frames_per_video": 1,
  "train_videos_per_id": 2,
  "val_videos_per_id": 1,
  "test_videos_per_id": 1,
  "methods_in_train": ["splice_soft", "splice_hard", "color_shift"],
  "seed": 31
})";

// Shared tiny dataset generated through the CLI itself.
const fs::path& cli_dataset() {
  static fs::path dir = [] {
    const fs::path p = fresh_dir("caddm_cli_data");
    const fs::path cfg = fs::temp_directory_path() / "caddm_cli_procgen.json";
    write_text(cfg, kProcgenConfig);
    const RunResult r =
        run_cli("procgen --config " + cfg.string() + " --out " + p.string());
    REQUIRE(r.exit_code == 0);
    return p;
  }();
  return dir;
}

}  // namespace

TEST_CASE("procgen creates the output directory and is reproducible") {
  const fs::path& d1 = cli_dataset();
  CHECK(fs::exists(d1 / "train.jsonl"));
  CHECK(fs::exists(d1 / "manifest.json"));
  CHECK(fs::exists(d1 / "run_manifest.json"));

  const fs::path d2 = fresh_dir("caddm_cli_data2");
  const fs::path cfg = fs::temp_directory_path() / "caddm_cli_procgen.json";
  const RunResult r = run_cli("procgen --config " + cfg.string() + " --out " + d2.string());
  REQUIRE(r.exit_code == 0);
  CHECK(dataset_hash(d1) == dataset_hash(d2));
}

TEST_CASE("unknown config keys exit with code 2 and name the key") {
  const fs::path cfg = fs::temp_directory_path() / "caddm_cli_bad.json";
  write_text(cfg, "{\"n_identities\": 8, \"bogus_key\": 1}");
  const fs::path out = fresh_dir("caddm_cli_bad_out");
  const RunResult r = run_cli("procgen --config " + cfg.string() + " --out " + out.string());
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("bogus_key") != std::string::npos);
  // A failed run leaves no manifest behind.
  CHECK_FALSE(fs::exists(out / "run_manifest.json"));
}

TEST_CASE("mfs pipeline stage runs and reports a summary") {
  const fs::path& data = cli_dataset();
  const fs::path out = fresh_dir("caddm_cli_mfs");
  const RunResult r = run_cli("mfs --annotations " + (data / "train.jsonl").string() +
                              " --out " + out.string() + " --seed 9");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.find("swapped") != std::string::npos);
  const auto anns = read_annotations((out / "annotations.jsonl").string());
  const auto orig = read_annotations((data / "train.jsonl").string());
  CHECK(anns.size() == orig.size());
  // Every re-spliced image resolves relative to the new annotation file.
  for (const auto& a : anns)
    CHECK(fs::exists(fs::path(out) / a.image_path));
}

TEST_CASE("mfs with empty input writes an empty output and exits 0") {
  const fs::path empty = fs::temp_directory_path() / "caddm_cli_empty.jsonl";
  write_text(empty, "");
  const fs::path out = fresh_dir("caddm_cli_mfs_empty");
  const RunResult r =
      run_cli("mfs --annotations " + empty.string() + " --out " + out.string());
  CHECK(r.exit_code == 0);
  CHECK(read_annotations((out / "annotations.jsonl").string()).empty());
}

namespace {

const std::string kTrainConfigTemplate = R"({
  "mode": "caddm",
  "batch_size": 8,
  "epochs": 1,
  "steps_per_epoch": 3,
  "lr_schedule": [[0, 0.001]],
  "seed": 13,
  "network": {"backbone_channels": [4, 6, 8, 12], "extra_channels": 12},
  "train_annotations": "$TRAIN",
  "val_annotations": "$VAL"
})";

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (size_t p = s.find(from); p != std::string::npos; p = s.find(from))
    s.replace(p, from.size(), to);
  return s;
}

const fs::path& cli_run_dir() {
  static fs::path dir = [] {
    const fs::path& data = cli_dataset();
    const fs::path run = fresh_dir("caddm_cli_run");
    const fs::path cfg = fs::temp_directory_path() / "caddm_cli_train.json";
    std::string text = kTrainConfigTemplate;
    text = replace_all(text, "$TRAIN", (data / "train.jsonl").string());
    text = replace_all(text, "$VAL", (data / "val.jsonl").string());
    write_text(cfg, text);
    const RunResult r = run_cli("train --config " + cfg.string() + " --out " + run.string());
    REQUIRE(r.exit_code == 0);
    return run;
  }();
  return dir;
}

}  // namespace

TEST_CASE("train produces checkpoints, a log and a manifest") {
  const fs::path& run = cli_run_dir();
  CHECK(fs::exists(run / "checkpoint_final.ckpt"));
  CHECK(fs::exists(run / "checkpoint_best.ckpt"));
  CHECK(fs::exists(run / "train_log.jsonl"));
  CHECK(fs::exists(run / "run_manifest.json"));
  const json manifest = json::parse(std::ifstream(run / "run_manifest.json"));
  CHECK(manifest.at("command") == "train");
  CHECK(manifest.at("seed") == 13);
  CHECK(manifest.contains("config_hash"));
  CHECK(manifest.contains("wall_clock_sec"));
}

TEST_CASE("eval scores a split and writes the metrics file") {
  const fs::path& data = cli_dataset();
  const fs::path& run = cli_run_dir();
  const fs::path out = fresh_dir("caddm_cli_eval");
  const RunResult r = run_cli("eval --checkpoint " + (run / "checkpoint_final.ckpt").string() +
                              " --annotations " + (data / "val.jsonl").string() + " --out " +
                              out.string());
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(out / "scores.jsonl"));
  const json m = json::parse(std::ifstream(out / "metrics.json"));
  CHECK(m.contains("acc"));
  CHECK(m.contains("frame_auc"));
  CHECK(m.contains("video_auc"));
  CHECK(m.contains("n"));
  CHECK(m.at("n").get<int>() > 0);
}

TEST_CASE("eval on a perfect-oracle score file reports unit AUC") {
  const fs::path scores = fs::temp_directory_path() / "caddm_cli_oracle.jsonl";
  {
    std::vector<EvalRecord> recs;
    for (int i = 0; i < 8; ++i) recs.push_back({i < 4 ? 0.9 : 0.1, i < 4 ? 1 : 0,
                                                "g" + std::to_string(i)});
    write_eval_records(scores.string(), recs);
  }
  const fs::path out = fresh_dir("caddm_cli_eval_oracle");
  const RunResult r = run_cli("eval --scores " + scores.string() + " --out " + out.string());
  REQUIRE(r.exit_code == 0);
  const json m = json::parse(std::ifstream(out / "metrics.json"));
  CHECK(m.at("frame_auc").get<double>() == doctest::Approx(1.0));
  CHECK(m.at("video_auc").get<double>() == doctest::Approx(1.0));
}

TEST_CASE("iil demands at least two identities") {
  const fs::path feats = fs::temp_directory_path() / "caddm_cli_onefeat.jsonl";
  // Two records, a single identity: the precondition must be named.
  write_text(feats,
             "{\"identity\":\"only\",\"label\":\"genuine\",\"feature_b64\":\"AACAPwAAgD8=\"}\n"
             "{\"identity\":\"only\",\"label\":\"fake\",\"feature_b64\":\"AACAPwAAAEA=\"}\n");
  const fs::path out = fresh_dir("caddm_cli_iil_bad");
  const RunResult r = run_cli("iil --features " + feats.string() + " --out " + out.string());
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("identities") != std::string::npos);
}

TEST_CASE("iil extracts features from a checkpoint and writes the report") {
  const fs::path& data = cli_dataset();
  const fs::path& run = cli_run_dir();
  const fs::path out = fresh_dir("caddm_cli_iil");
  const RunResult r = run_cli("iil --checkpoint " + (run / "checkpoint_final.ckpt").string() +
                              " --annotations " + (data / "test_crossmethod.jsonl").string() +
                              " --out " + out.string() + " --probe-epochs 40");
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(out / "features.jsonl"));
  const json rep = json::parse(std::ifstream(out / "iil_report.json"));
  CHECK(rep.contains("overlap"));
  CHECK(rep.at("probe").contains("final_heldout_acc"));
}

TEST_CASE("viz writes one annotated copy per record") {
  const fs::path& data = cli_dataset();
  const fs::path& run = cli_run_dir();
  const fs::path out = fresh_dir("caddm_cli_viz");
  const RunResult r = run_cli("viz --checkpoint " + (run / "checkpoint_final.ckpt").string() +
                              " --annotations " + (data / "val.jsonl").string() + " --out " +
                              out.string() + " --limit 6");
  REQUIRE(r.exit_code == 0);
  size_t pngs = 0;
  for (const auto& e : fs::directory_iterator(out))
    if (e.path().extension() == ".png") ++pngs;
  CHECK(pngs == 6);
}

TEST_CASE("checkpoint and scores flags are mutually required") {
  const fs::path out = fresh_dir("caddm_cli_eval_bad");
  const RunResult r = run_cli("eval --out " + out.string());
  CHECK(r.exit_code == 2);
}
