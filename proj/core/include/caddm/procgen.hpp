#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "caddm/image.hpp"
#include "caddm/rng.hpp"

namespace caddm {

// Parametric face identity. Parameters are drawn once per identity and kept
// fixed across frames; per-frame pose jitter and sensor noise come from the
// render options.
struct IdentitySpec {
  std::string id_tag;
  double face_hue = 0.0;         // [0,1) hue of the skin tone
  double face_ellipse_ax = 34;   // semi-axes, pixels
  double face_ellipse_ay = 40;
  double eye_spacing = 20;       // distance between eye centers, pixels
  double eye_size = 4;           // eye radius, pixels
  double mouth_curvature = 0.0;  // [-0.5, 0.5]
  double nose_length = 12;       // pixels
  double background_tone = 0.5;  // flat gray background level
};

IdentitySpec sample_identity(const std::string& tag, Rng& rng);

struct RenderOptions {
  double jitter = 1.0;       // scales per-frame pose/illumination jitter
  double noise_sigma = 0.01; // additive Gaussian sensor noise
};

// 112x112 render: background, elliptical head, two eyes, nose, mouth.
Image render_identity(const IdentitySpec& spec, const RenderOptions& opt, Rng& rng);

enum class SwapMethod { splice_soft, splice_hard, color_shift, warp };

const std::vector<std::string>& all_swap_methods();
SwapMethod swap_method_from_string(const std::string& name);
std::string swap_method_to_string(SwapMethod m);

struct SwapMethodSpec {
  SwapMethod tag = SwapMethod::splice_hard;
  double feather_px = 3.0;  // splice_soft boundary band
  double hue_shift = 0.08;  // color_shift magnitude; sign drawn per call
  double warp_amp = 2.0;    // pixels
  double warp_freq = 3.0;   // cycles across the swapped region
  RenderOptions target_render{1.0, 0.01};
};

struct ToySwapResult {
  Image image;
  std::array<int, 4> box;  // true manipulated-region bounds, half-open pixels
};

// Renders the target identity and composites its inner-face region onto
// `source` with the given method. Every method re-renders the region, so
// the seam and the fresh noise field are the shared artifact carrier.
ToySwapResult toy_swap(const Image& source, const IdentitySpec& target,
                       const SwapMethodSpec& method, Rng& rng);

struct ProcgenConfig {
  int n_identities = 16;
  int frames_per_video = 4;
  int train_videos_per_id = 6;  // genuine videos per id; fake videos match this count
  int val_videos_per_id = 2;
  int test_videos_per_id = 3;
  std::vector<std::string> methods_in_train{"splice_soft", "splice_hard", "color_shift"};
  std::vector<std::string> methods_in_test;  // empty = complement of methods_in_train
  // When set, fake sources in train/val/in-method test come only from the
  // first half of the identities and the cross-method split only from the
  // second half, so no identity crosses from training into the
  // cross-method evaluation.
  bool identity_disjoint_eval = true;
  uint64_t seed = 1;
  std::string out_dir;
};

struct ProcgenSummary {
  std::map<std::string, std::array<int, 2>> counts;  // split -> {genuine, fake}
  bool cross_method_test_empty = false;
  std::vector<std::string> annotation_files;
  std::string manifest_path;
};

// Emits PNG frames plus JSON-lines annotation files (train/val/
// test_inmethod/test_crossmethod) and a manifest recording config and seed.
// Byte-reproducible from (seed, config).
ProcgenSummary build_dataset(const ProcgenConfig& cfg);

}  // namespace caddm
