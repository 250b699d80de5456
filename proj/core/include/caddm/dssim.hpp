#pragma once

#include "caddm/image.hpp"

namespace caddm {

// Structural-similarity parameters: 11x11 Gaussian window with sigma 1.5,
// stabilizers C1 = 0.01^2 and C2 = 0.03^2 on the [0,1] dynamic range.
inline constexpr int kSsimRadius = 5;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;

// Per-pixel structural dissimilarity (1 - SSIM) / 2 between the luminance
// planes (channel mean) of two equally shaped images. Borders are handled
// by reflection. Symmetric in its arguments, zero on identical inputs.
DssimMap dssim_map(const Image& a, const Image& b);

}  // namespace caddm
