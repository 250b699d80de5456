#include "caddm/procgen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "caddm/annotation.hpp"
#include "caddm/png_io.hpp"
#include "json_util.hpp"

namespace caddm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kSize = 112;
constexpr double kCenter = (kSize - 1) / 2.0;

std::array<double, 3> hsv_to_rgb(double h, double s, double v) {
  h = h - std::floor(h);
  const double hh = h * 6.0;
  const int i = static_cast<int>(hh) % 6;
  const double f = hh - std::floor(hh);
  const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  switch (i) {
    case 0: return {v, t, p};
    case 1: return {q, v, p};
    case 2: return {p, v, t};
    case 3: return {p, q, v};
    case 4: return {t, p, v};
    default: return {v, p, q};
  }
}

std::array<double, 3> rgb_to_hsv(double r, double g, double b) {
  const double mx = std::max({r, g, b}), mn = std::min({r, g, b});
  const double d = mx - mn;
  double h = 0;
  if (d > 0) {
    if (mx == r)
      h = std::fmod((g - b) / d, 6.0) / 6.0;
    else if (mx == g)
      h = ((b - r) / d + 2.0) / 6.0;
    else
      h = ((r - g) / d + 4.0) / 6.0;
    if (h < 0) h += 1.0;
  }
  const double s = mx > 0 ? d / mx : 0.0;
  return {h, s, mx};
}

inline double coverage(double signed_dist_px, double edge = 1.0) {
  return std::clamp(0.5 - signed_dist_px / edge, 0.0, 1.0);
}

inline void mix(double* px, const std::array<double, 3>& c, double a) {
  for (int k = 0; k < 3; ++k) px[k] = px[k] * (1 - a) + c[static_cast<size_t>(k)] * a;
}

// Approximate signed pixel distance to an axis-aligned ellipse boundary.
inline double ellipse_dist(double x, double y, double cx, double cy, double ax, double ay) {
  const double dx = (x - cx) / ax, dy = (y - cy) / ay;
  return (std::sqrt(dx * dx + dy * dy) - 1.0) * std::min(ax, ay);
}

}  // namespace

IdentitySpec sample_identity(const std::string& tag, Rng& rng) {
  IdentitySpec s;
  s.id_tag = tag;
  s.face_hue = rng.uniform();
  s.face_ellipse_ax = rng.uniform(28.0, 40.0);
  s.face_ellipse_ay = rng.uniform(32.0, 46.0);
  s.eye_spacing = rng.uniform(16.0, 26.0);
  s.eye_size = rng.uniform(2.5, 5.5);
  s.mouth_curvature = rng.uniform(-0.5, 0.5);
  s.nose_length = rng.uniform(8.0, 16.0);
  s.background_tone = rng.uniform(0.15, 0.85);
  return s;
}

Image render_identity(const IdentitySpec& spec, const RenderOptions& opt, Rng& rng) {
  const double j = opt.jitter;
  const double cx = kCenter + std::clamp(rng.normal(0.0, 1.2 * j), -3.0, 3.0);
  const double cy = kCenter + std::clamp(rng.normal(0.0, 1.2 * j), -3.0, 3.0);
  const double ax = spec.face_ellipse_ax * (1.0 + 0.015 * j * rng.normal());
  const double ay = spec.face_ellipse_ay * (1.0 + 0.015 * j * rng.normal());
  const double hue = spec.face_hue + 0.004 * j * rng.normal();
  const double val = std::clamp(0.82 * (1.0 + 0.02 * j * rng.normal()), 0.05, 1.0);
  const double bg = std::clamp(spec.background_tone + 0.01 * j * rng.normal(), 0.0, 1.0);

  const auto face = hsv_to_rgb(hue, 0.55, val);
  const std::array<double, 3> eye_color{0.10, 0.10, 0.14};
  const std::array<double, 3> nose_color{face[0] * 0.75, face[1] * 0.75, face[2] * 0.75};
  const std::array<double, 3> mouth_color{0.55, 0.15, 0.18};

  const double eye_y = cy - 0.22 * ay;
  const double eye_dx = spec.eye_spacing / 2.0;
  const double mouth_y = cy + 0.45 * ay;
  const double mouth_hw = 0.38 * ax;

  Image img(kSize, kSize, 0.0);
  for (int y = 0; y < kSize; ++y) {
    for (int x = 0; x < kSize; ++x) {
      double* px = &img.at(y, x, 0);
      px[0] = px[1] = px[2] = bg;

      const double df = ellipse_dist(x, y, cx, cy, ax, ay);
      const double af = coverage(df);
      if (af <= 0.0) continue;
      mix(px, face, af);

      for (int e = -1; e <= 1; e += 2) {
        const double ex = cx + e * eye_dx;
        const double d = std::hypot(x - ex, y - eye_y) - spec.eye_size;
        mix(px, eye_color, coverage(d) * af);
      }

      // Nose: vertical bar from just above center.
      const double ny0 = cy - 1.0, ny1 = cy - 1.0 + spec.nose_length;
      const double dyn = std::max({ny0 - y, y - ny1, 0.0});
      const double dn = std::hypot(std::max(std::abs(x - cx) - 0.9, 0.0), dyn) - 0.9;
      mix(px, nose_color, coverage(dn) * af);

      // Mouth: parabolic stroke.
      const double t = (x - cx) / mouth_hw;
      if (std::abs(t) <= 1.15) {
        const double my = mouth_y + spec.mouth_curvature * 6.0 * (t * t - 0.5);
        const double dm = std::hypot(std::max(std::abs(t) - 1.0, 0.0) * mouth_hw, y - my) - 1.4;
        mix(px, mouth_color, coverage(dm) * af);
      }
    }
  }

  if (opt.noise_sigma > 0.0)
    for (double& v : img.data) v += rng.normal(0.0, opt.noise_sigma);
  clamp01(img);
  return img;
}

const std::vector<std::string>& all_swap_methods() {
  static const std::vector<std::string> names{"splice_soft", "splice_hard", "color_shift",
                                              "warp"};
  return names;
}

SwapMethod swap_method_from_string(const std::string& name) {
  if (name == "splice_soft") return SwapMethod::splice_soft;
  if (name == "splice_hard") return SwapMethod::splice_hard;
  if (name == "color_shift") return SwapMethod::color_shift;
  if (name == "warp") return SwapMethod::warp;
  throw std::invalid_argument("unknown swap method: " + name);
}

std::string swap_method_to_string(SwapMethod m) {
  switch (m) {
    case SwapMethod::splice_soft: return "splice_soft";
    case SwapMethod::splice_hard: return "splice_hard";
    case SwapMethod::color_shift: return "color_shift";
    case SwapMethod::warp: return "warp";
  }
  return "?";
}

ToySwapResult toy_swap(const Image& source, const IdentitySpec& target,
                       const SwapMethodSpec& method, Rng& rng) {
  if (source.height != kSize || source.width != kSize)
    throw std::invalid_argument("toy_swap: source must be 112x112");

  Image rendered = render_identity(target, method.target_render, rng);

  const double rx = 0.72 * target.face_ellipse_ax;
  const double ry = 0.78 * target.face_ellipse_ay;

  Mask m(kSize, kSize, 0.0);
  for (int y = 0; y < kSize; ++y)
    for (int x = 0; x < kSize; ++x) {
      const double d = ellipse_dist(x, y, kCenter, kCenter, rx, ry);
      double v = 0.0;
      switch (method.tag) {
        case SwapMethod::splice_hard:
        case SwapMethod::color_shift:
          v = d <= 0.0 ? 1.0 : 0.0;
          break;
        case SwapMethod::splice_soft: {
          const double t = std::clamp(-d / method.feather_px, 0.0, 1.0);
          v = t * t * (3 - 2 * t);
          break;
        }
        case SwapMethod::warp: {
          const double t = std::clamp(-d / 2.0, 0.0, 1.0);
          v = t * t * (3 - 2 * t);
          break;
        }
      }
      m.at(y, x) = v;
    }

  // Method-specific draws, fixed order.
  if (method.tag == SwapMethod::color_shift) {
    const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
    const double delta = sign * method.hue_shift * (0.7 + 0.6 * rng.uniform());
    for (int y = 0; y < kSize; ++y)
      for (int x = 0; x < kSize; ++x) {
        if (m.at(y, x) <= 0.0) continue;
        auto hsv = rgb_to_hsv(rendered.at(y, x, 0), rendered.at(y, x, 1), rendered.at(y, x, 2));
        const auto rgb = hsv_to_rgb(hsv[0] + delta, hsv[1], hsv[2]);
        for (int c = 0; c < 3; ++c) rendered.at(y, x, c) = rgb[static_cast<size_t>(c)];
      }
  } else if (method.tag == SwapMethod::warp) {
    const double p1 = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    const double p2 = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    Image warped = rendered;
    const double k = 2.0 * 3.14159265358979323846 * method.warp_freq / kSize;
    for (int y = 0; y < kSize; ++y)
      for (int x = 0; x < kSize; ++x) {
        if (m.at(y, x) <= 0.0) continue;
        const double sx = x + method.warp_amp * std::sin(k * y + p1);
        const double sy = y + method.warp_amp * std::sin(k * x + p2);
        const int x0 = std::clamp(static_cast<int>(std::floor(sx)), 0, kSize - 1);
        const int y0 = std::clamp(static_cast<int>(std::floor(sy)), 0, kSize - 1);
        const int x1 = std::min(x0 + 1, kSize - 1), y1 = std::min(y0 + 1, kSize - 1);
        const double wx = std::clamp(sx - x0, 0.0, 1.0), wy = std::clamp(sy - y0, 0.0, 1.0);
        for (int c = 0; c < 3; ++c) {
          const double top = rendered.at(y0, x0, c) * (1 - wx) + rendered.at(y0, x1, c) * wx;
          const double bot = rendered.at(y1, x0, c) * (1 - wx) + rendered.at(y1, x1, c) * wx;
          warped.at(y, x, c) = top * (1 - wy) + bot * wy;
        }
      }
    rendered = std::move(warped);
  }

  ToySwapResult out;
  out.image = source;
  int bx0 = kSize, by0 = kSize, bx1 = 0, by1 = 0;
  for (int y = 0; y < kSize; ++y)
    for (int x = 0; x < kSize; ++x) {
      const double a = m.at(y, x);
      if (a <= 0.0) continue;
      bx0 = std::min(bx0, x);
      by0 = std::min(by0, y);
      bx1 = std::max(bx1, x + 1);
      by1 = std::max(by1, y + 1);
      for (int c = 0; c < 3; ++c)
        out.image.at(y, x, c) =
            out.image.at(y, x, c) * (1 - a) + rendered.at(y, x, c) * a;
    }
  clamp01(out.image);
  out.box = {bx0, by0, bx1, by1};
  return out;
}

namespace {

constexpr uint64_t kStreamIdentity = 1;
constexpr uint64_t kStreamGenuine = 2;
constexpr uint64_t kStreamFake = 3;

struct SplitPlan {
  std::string name;
  std::vector<int> ids;              // identity indices used by the split
  std::vector<std::string> methods;  // fake-generation methods
  int videos_per_id = 0;
};

}  // namespace

ProcgenSummary build_dataset(const ProcgenConfig& cfg) {
  if (cfg.n_identities < 8)
    throw std::invalid_argument("build_dataset: at least 8 identities required");
  if (cfg.frames_per_video < 1 || cfg.train_videos_per_id < 1 || cfg.val_videos_per_id < 1 ||
      cfg.test_videos_per_id < 1)
    throw std::invalid_argument("build_dataset: counts must be positive");
  if (cfg.methods_in_train.empty())
    throw std::invalid_argument("build_dataset: methods_in_train must not be empty");
  for (const auto& m : cfg.methods_in_train) swap_method_from_string(m);

  std::vector<std::string> test_methods = cfg.methods_in_test;
  if (test_methods.empty()) {
    for (const auto& m : all_swap_methods())
      if (std::find(cfg.methods_in_train.begin(), cfg.methods_in_train.end(), m) ==
          cfg.methods_in_train.end())
        test_methods.push_back(m);
  } else {
    for (const auto& m : test_methods) swap_method_from_string(m);
  }

  const fs::path out(cfg.out_dir);
  fs::create_directories(out / "images");

  const Rng root(cfg.seed);
  std::vector<IdentitySpec> identities;
  for (int i = 0; i < cfg.n_identities; ++i) {
    char tag[8];
    std::snprintf(tag, sizeof(tag), "id%02d", i);
    Rng r = root.derive(kStreamIdentity, static_cast<uint64_t>(i));
    identities.push_back(sample_identity(tag, r));
  }
  std::vector<int> first_half, second_half, all_ids;
  for (int i = 0; i < cfg.n_identities; ++i) {
    all_ids.push_back(i);
    (i < cfg.n_identities / 2 ? first_half : second_half).push_back(i);
  }
  const auto& train_ids = cfg.identity_disjoint_eval ? first_half : all_ids;
  const auto& cross_ids = cfg.identity_disjoint_eval ? second_half : all_ids;

  const std::vector<SplitPlan> plans{
      {"train", train_ids, cfg.methods_in_train, cfg.train_videos_per_id},
      {"val", train_ids, cfg.methods_in_train, cfg.val_videos_per_id},
      {"test_inmethod", train_ids, cfg.methods_in_train, cfg.test_videos_per_id},
      {"test_crossmethod", cross_ids, test_methods, cfg.test_videos_per_id}};

  ProcgenSummary summary;
  const RenderOptions frame_opts;  // default jitter and sensor noise

  for (size_t si = 0; si < plans.size(); ++si) {
    const SplitPlan& plan = plans[si];
    std::vector<ArtifactAnnotation> anns;
    const bool empty_split = plan.name == "test_crossmethod" && plan.methods.empty();

    if (!empty_split) {
      // The identity trap: complementary graded counts. Within a split,
      // identity k contributes few fakes and many genuine videos at the low
      // end and the reverse at the high end, so the label is partially
      // predictable from the identity alone and exploiting that fully
      // requires a per-identity code. Totals stay exactly balanced.
      const std::vector<int>& sources = plan.ids;
      const int total_videos = static_cast<int>(plan.ids.size()) * plan.videos_per_id;
      std::vector<int> fake_videos(sources.size(), 0), genuine_videos(sources.size(), 0);
      {
        const size_t m = sources.size();
        auto largest_remainder = [&](auto share) {
          std::vector<int> out(m, 0);
          double sum = 0.0;
          for (size_t k = 0; k < m; ++k) sum += share(k);
          int assigned = 0;
          std::vector<std::pair<double, size_t>> rem;
          for (size_t k = 0; k < m; ++k) {
            const double raw = total_videos * share(k) / sum;
            out[k] = static_cast<int>(raw);
            assigned += out[k];
            rem.push_back({raw - out[k], k});
          }
          std::stable_sort(rem.begin(), rem.end(),
                           [](const auto& a, const auto& b) { return a.first > b.first; });
          for (int k = 0; assigned < total_videos; ++k, ++assigned)
            ++out[rem[static_cast<size_t>(k)].second];
          return out;
        };
        fake_videos = largest_remainder([&](size_t k) { return k + 0.5; });
        genuine_videos =
            largest_remainder([&](size_t k) { return sources.size() - k - 0.5; });
      }

      // Genuine pseudo-videos. Every identity renders a full pool of
      // videos_per_id videos (fakes need source frames even for identities
      // whose genuine quota in this split is small); only the first
      // genuine_videos[k] of the pool become annotated records.
      std::map<int, std::vector<std::vector<Image>>> src_vids;
      std::map<int, std::vector<std::vector<std::string>>> src_paths;
      for (size_t k = 0; k < plan.ids.size(); ++k) {
        const int id = plan.ids[k];
        const IdentitySpec& spec = identities[static_cast<size_t>(id)];
        const int pool = std::max(plan.videos_per_id, genuine_videos[k]);
        for (int v = 0; v < pool; ++v) {
          const Rng vr = root.derive(kStreamGenuine, si,
                                     static_cast<uint64_t>(id) * 4096 + static_cast<uint64_t>(v));
          std::vector<Image> frames;
          std::vector<std::string> paths;
          for (int f = 0; f < cfg.frames_per_video; ++f) {
            Rng fr = vr.derive(static_cast<uint64_t>(f));
            Image img = render_identity(spec, frame_opts, fr);
            char name[96];
            std::snprintf(name, sizeof(name), "g_%s_%s_v%02d_f%02d.png", plan.name.c_str(),
                          spec.id_tag.c_str(), v, f);
            const std::string rel = std::string("images/") + name;
            write_png((out / rel).string(), img);
            if (v < genuine_videos[k]) {
              ArtifactAnnotation a;
              a.image_path = rel;
              a.fake = false;
              a.identity = spec.id_tag;
              char grp[64];
              std::snprintf(grp, sizeof(grp), "g_%s_%s_v%02d", plan.name.c_str(),
                            spec.id_tag.c_str(), v);
              a.group_id = grp;
              a.validate(kSize, kSize);
              anns.push_back(a);
            }
            frames.push_back(std::move(img));
            paths.push_back(rel);
          }
          src_vids[id].push_back(std::move(frames));
          src_paths[id].push_back(std::move(paths));
          if (v < genuine_videos[k])
            summary.counts[plan.name][0] += cfg.frames_per_video;
        }
      }

      // Fake pseudo-videos, per source identity at its graded rate.
      for (size_t k = 0; k < sources.size(); ++k) {
        const int id = sources[k];
        const IdentitySpec& spec = identities[static_cast<size_t>(id)];
        for (int v = 0; v < fake_videos[k]; ++v) {
          Rng vr = root.derive(kStreamFake, si,
                               static_cast<uint64_t>(id) * 4096 + static_cast<uint64_t>(v));
          const int sv = static_cast<int>(vr.uniform_int(0, plan.videos_per_id - 1));
          int tgt_pos = static_cast<int>(
              vr.uniform_int(0, static_cast<int64_t>(plan.ids.size()) - 2));
          // Skip the source identity itself.
          int tgt = -1;
          for (int cand : plan.ids) {
            if (cand == id) continue;
            if (tgt_pos-- == 0) {
              tgt = cand;
              break;
            }
          }
          const IdentitySpec& tspec = identities[static_cast<size_t>(tgt)];
          const std::string mname =
              plan.methods[static_cast<size_t>(vr.uniform_int(
                  0, static_cast<int64_t>(plan.methods.size()) - 1))];
          SwapMethodSpec mspec;
          mspec.tag = swap_method_from_string(mname);
          mspec.feather_px = vr.uniform(2.0, 4.0);
          mspec.hue_shift = vr.uniform(0.05, 0.12);
          mspec.warp_amp = vr.uniform(1.5, 3.0);
          mspec.warp_freq = vr.uniform(2.0, 4.0);

          for (int f = 0; f < cfg.frames_per_video; ++f) {
            Rng fr = vr.derive(100 + static_cast<uint64_t>(f));
            ToySwapResult swap =
                toy_swap(src_vids[id][static_cast<size_t>(sv)][static_cast<size_t>(f)], tspec,
                         mspec, fr);
            char name[112];
            std::snprintf(name, sizeof(name), "f_%s_%s_%sto%s_v%02d_f%02d.png",
                          plan.name.c_str(), mname.c_str(), spec.id_tag.c_str(),
                          tspec.id_tag.c_str(), v, f);
            const std::string rel = std::string("images/") + name;
            write_png((out / rel).string(), swap.image);
            ArtifactAnnotation a;
            a.image_path = rel;
            a.fake = true;
            a.identity = spec.id_tag;
            a.source_path = src_paths[id][static_cast<size_t>(sv)][static_cast<size_t>(f)];
            a.artifact_boxes.push_back(swap.box);
            char grp[96];
            std::snprintf(grp, sizeof(grp), "f_%s_%s_%s_v%02d", plan.name.c_str(),
                          mname.c_str(), spec.id_tag.c_str(), v);
            a.group_id = grp;
            a.validate(kSize, kSize);
            anns.push_back(a);
          }
          summary.counts[plan.name][1] += cfg.frames_per_video;
        }
      }
    } else {
      summary.cross_method_test_empty = true;
      summary.counts[plan.name] = {0, 0};
    }

    const std::string ann_path = (out / (plan.name + ".jsonl")).string();
    write_annotations(ann_path, anns);
    summary.annotation_files.push_back(ann_path);
  }

  json manifest;
  manifest["seed"] = cfg.seed;
  manifest["n_identities"] = cfg.n_identities;
  manifest["frames_per_video"] = cfg.frames_per_video;
  manifest["train_videos_per_id"] = cfg.train_videos_per_id;
  manifest["val_videos_per_id"] = cfg.val_videos_per_id;
  manifest["test_videos_per_id"] = cfg.test_videos_per_id;
  manifest["methods_in_train"] = cfg.methods_in_train;
  manifest["methods_in_test"] = test_methods;
  manifest["identity_disjoint_eval"] = cfg.identity_disjoint_eval;
  manifest["cross_method_test_empty"] = summary.cross_method_test_empty;
  json counts;
  for (const auto& [k, v] : summary.counts) counts[k] = {{"genuine", v[0]}, {"fake", v[1]}};
  manifest["counts"] = counts;
  json ids = json::array();
  for (const auto& s : identities)
    ids.push_back({{"id_tag", s.id_tag},
                   {"face_hue", s.face_hue},
                   {"face_ellipse_axes", std::array<double, 2>{s.face_ellipse_ax, s.face_ellipse_ay}},
                   {"eye_spacing", s.eye_spacing},
                   {"eye_size", s.eye_size},
                   {"mouth_curvature", s.mouth_curvature},
                   {"nose_length", s.nose_length},
                   {"background_tone", s.background_tone}});
  manifest["identities"] = ids;

  summary.manifest_path = (out / "manifest.json").string();
  std::ofstream mf(summary.manifest_path, std::ios::trunc);
  mf << manifest.dump(2) << '\n';
  return summary;
}

}  // namespace caddm
