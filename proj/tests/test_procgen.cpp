#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "caddm/annotation.hpp"
#include "caddm/hash.hpp"
#include "caddm/procgen.hpp"

using namespace caddm;
namespace fs = std::filesystem;

namespace {

double mean_abs_diff(const Image& a, const Image& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) s += std::abs(a.data[i] - b.data[i]);
  return s / static_cast<double>(a.data.size());
}

uint64_t file_hash(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a64(bytes);
}

// Content hash of a dataset directory (relative path + bytes, sorted).
uint64_t dir_hash(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& f : files) {
    h = fnv1a64(fs::relative(f, root).string(), h);
    const uint64_t fh = file_hash(f);
    h = fnv1a64(&fh, sizeof(fh), h);
  }
  return h;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("renders are deterministic per seed and stream") {
  Rng r(91);
  const IdentitySpec spec = sample_identity("id00", r);
  Rng a(5), b(5);
  const Image ia = render_identity(spec, {}, a);
  const Image ib = render_identity(spec, {}, b);
  CHECK(ia.data == ib.data);
}

TEST_CASE("zero jitter and zero noise give the pure parametric render") {
  Rng r(92);
  const IdentitySpec spec = sample_identity("id01", r);
  Rng a(1), b(999);  // different streams must not matter
  const Image ia = render_identity(spec, {0.0, 0.0}, a);
  const Image ib = render_identity(spec, {0.0, 0.0}, b);
  CHECK(ia.data == ib.data);
}

TEST_CASE("distinct identities render visibly differently") {
  Rng r(93);
  double worst = 1.0;
  for (int pair = 0; pair < 100; ++pair) {
    const IdentitySpec sa = sample_identity("a", r);
    const IdentitySpec sb = sample_identity("b", r);
    Rng ra(1), rb(1);
    const double d = mean_abs_diff(render_identity(sa, {0.0, 0.0}, ra),
                                   render_identity(sb, {0.0, 0.0}, rb));
    worst = std::min(worst, d);
  }
  CHECK(worst > 0.01);
}

TEST_CASE("hard splice changes pixels only inside the reported box") {
  Rng r(94);
  const IdentitySpec src = sample_identity("src", r);
  const IdentitySpec tgt = sample_identity("tgt", r);
  Rng rr(3);
  const Image source = render_identity(src, {0.0, 0.0}, rr);
  SwapMethodSpec method;
  method.tag = SwapMethod::splice_hard;
  Rng sr(4);
  const ToySwapResult out = toy_swap(source, tgt, method, sr);
  CHECK(out.box[0] >= 0);
  CHECK(out.box[1] >= 0);
  CHECK(out.box[2] <= 112);
  CHECK(out.box[3] <= 112);
  for (int y = 0; y < 112; ++y)
    for (int x = 0; x < 112; ++x) {
      if (x >= out.box[0] && x < out.box[2] && y >= out.box[1] && y < out.box[3]) continue;
      for (int c = 0; c < 3; ++c) CHECK(out.image.at(y, x, c) == source.at(y, x, c));
    }
}

TEST_CASE("self swap with zero jitter is below the noise floor") {
  Rng r(95);
  const IdentitySpec spec = sample_identity("self", r);
  Rng rr(6);
  const Image source = render_identity(spec, {0.0, 0.0}, rr);
  for (const SwapMethod m : {SwapMethod::splice_hard, SwapMethod::splice_soft}) {
    SwapMethodSpec method;
    method.tag = m;
    method.target_render = {0.0, 0.0};
    Rng sr(7);
    const ToySwapResult out = toy_swap(source, spec, method, sr);
    double worst = 0.0;
    for (size_t i = 0; i < source.data.size(); ++i)
      worst = std::max(worst, std::abs(out.image.data[i] - source.data[i]));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("swap boxes stay inside the image across methods") {
  Rng r(96);
  const IdentitySpec src = sample_identity("s", r);
  Rng rr(8);
  const Image source = render_identity(src, {}, rr);
  for (int t = 0; t < 40; ++t) {
    Rng ir(200 + static_cast<uint64_t>(t));
    const IdentitySpec tgt = sample_identity("t", ir);
    SwapMethodSpec method;
    method.tag = static_cast<SwapMethod>(t % 4);
    Rng sr(300 + static_cast<uint64_t>(t));
    const ToySwapResult out = toy_swap(source, tgt, method, sr);
    CHECK(out.box[0] >= 0);
    CHECK(out.box[1] >= 0);
    CHECK(out.box[2] > out.box[0]);
    CHECK(out.box[3] > out.box[1]);
    CHECK(out.box[2] <= 112);
    CHECK(out.box[3] <= 112);
  }
}

namespace {

ProcgenConfig small_config(const std::string& out) {
  ProcgenConfig cfg;
  cfg.n_identities = 8;
  cfg.frames_per_video = 1;
  cfg.train_videos_per_id = 2;
  cfg.val_videos_per_id = 1;
  cfg.test_videos_per_id = 1;
  cfg.methods_in_train = {"splice_soft", "splice_hard", "color_shift"};
  cfg.seed = 11;
  cfg.out_dir = out;
  return cfg;
}

}  // namespace

TEST_CASE("dataset splits are balanced, identity-disjoint and annotated") {
  const fs::path dir = fresh_dir("caddm_procgen_t1");
  const ProcgenConfig cfg = small_config(dir.string());
  const ProcgenSummary sum = build_dataset(cfg);
  CHECK_FALSE(sum.cross_method_test_empty);

  std::set<std::string> train_ids, cross_ids;
  for (const auto& name : {"train", "val", "test_inmethod", "test_crossmethod"}) {
    const auto anns = read_annotations((dir / (std::string(name) + ".jsonl")).string());
    REQUIRE(!anns.empty());
    int genuine = 0, fake = 0;
    for (const auto& a : anns) {
      (a.fake ? fake : genuine) += 1;
      if (a.fake) {
        CHECK(a.artifact_boxes.size() == 1);
        REQUIRE(a.source_path.has_value());
        CHECK(fs::exists(dir / *a.source_path));
      } else {
        CHECK(a.artifact_boxes.empty());
      }
      CHECK(fs::exists(dir / a.image_path));
      CHECK(!a.group_id.empty());
      if (std::string(name) == "train") train_ids.insert(a.identity);
      if (std::string(name) == "test_crossmethod") cross_ids.insert(a.identity);
    }
    // Exact 50/50 by construction.
    CHECK(genuine == fake);
  }
  for (const auto& id : cross_ids) CHECK(train_ids.count(id) == 0);
}

TEST_CASE("training on every method empties the cross-method split") {
  const fs::path dir = fresh_dir("caddm_procgen_t2");
  ProcgenConfig cfg = small_config(dir.string());
  cfg.methods_in_train = {"splice_soft", "splice_hard", "color_shift", "warp"};
  const ProcgenSummary sum = build_dataset(cfg);
  CHECK(sum.cross_method_test_empty);
  const auto anns = read_annotations((dir / "test_crossmethod.jsonl").string());
  CHECK(anns.empty());
}

TEST_CASE("dataset generation is byte-reproducible") {
  const fs::path d1 = fresh_dir("caddm_procgen_t3a");
  const fs::path d2 = fresh_dir("caddm_procgen_t3b");
  ProcgenConfig c1 = small_config(d1.string());
  ProcgenConfig c2 = small_config(d2.string());
  build_dataset(c1);
  build_dataset(c2);
  CHECK(dir_hash(d1) == dir_hash(d2));
}

TEST_CASE("too few identities are rejected") {
  ProcgenConfig cfg = small_config("/tmp/unused");
  cfg.n_identities = 6;
  CHECK_THROWS_AS(build_dataset(cfg), std::invalid_argument);
}
