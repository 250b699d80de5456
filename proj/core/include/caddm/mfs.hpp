#pragma once

#include <array>
#include <vector>

#include "caddm/annotation.hpp"
#include "caddm/image.hpp"
#include "caddm/rng.hpp"

namespace caddm {

// Top-left corner (x = column, y = row) and size of a sliding window,
// fully inside the image.
struct SlidingWindow {
  int x = 0;
  int y = 0;
  int h = 0;
  int w = 0;
};

// Position maximizing the window sum of d, computed with a summed-area
// table. Ties break toward the smallest y, then the smallest x.
SlidingWindow select_window(const DssimMap& d, int h, int w);

struct MfsConfig {
  double p_global = 0.25;                 // probability of a global swap per sample
  std::vector<std::array<int, 2>> scale_buckets{{20, 40}, {40, 60}, {60, 80}, {112, 112}};
  double p_poisson = 0.5;                 // partial-swap blend coin
  double global_axis_lo = 0.60;           // ellipse diameter as a fraction of the image
  double global_axis_hi = 0.80;
  double global_sigma_lo = 3.0;           // mask blur
  double global_sigma_hi = 7.0;
};

enum class BlendKind { alpha, poisson };

struct MfsOutcome {
  Image image;
  ArtifactAnnotation ann;  // label and boxes; paths are the caller's business
  bool global = false;
  int bucket = -1;         // index into scale_buckets, -1 for direct global swaps
  BlendKind blend = BlendKind::alpha;
  bool poisson_fallback = false;  // poisson drawn but window touched the border
};

// Splices the most artifact-dense window (per the DSSIM map) of `fake`
// onto `source`. Window height/width are drawn independently and uniformly
// from [lo, hi]; the blend is an even coin between alpha and gradient-domain
// blending. A window covering the whole image degenerates to a global swap.
// Identical inputs yield a genuine record with no box.
MfsOutcome partial_swap(const Image& fake, const Image& source, int lo, int hi,
                        Rng& rng, const MfsConfig& cfg = {});

// Whole-face blend: a Gaussian-smoothed centered elliptical mask covering
// the central 60-80% of the image, alpha-blended; the annotation box is the
// bounding box of the mask support.
MfsOutcome global_swap(const Image& fake, const Image& source, Rng& rng,
                       const MfsConfig& cfg = {});

// Full per-sample pipeline: global-vs-partial coin, then bucket choice.
MfsOutcome mfs_sample(const Image& fake, const Image& source, const MfsConfig& cfg,
                      Rng& rng);

}  // namespace caddm
