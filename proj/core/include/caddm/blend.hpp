#pragma once

#include "caddm/image.hpp"

namespace caddm {

// out = fake * M + source * (1 - M), per pixel per channel.
Image alpha_blend(const Image& fake, const Image& source, const Mask& mask);

struct PoissonStats {
  int iterations = 0;
  double residual_max = 0.0;  // max-norm of the linear-system residual
};

// Gradient-domain blend: solves the discrete Poisson equation inside the
// binary mask with the fake image's gradient field as guidance and
// source-image boundary values (conjugate gradients, residual max-norm
// <= tol). Outside the mask the output equals source exactly; the solved
// region is clamped to [0,1].
//
// Preconditions: mask values in {0,1}; no masked pixel on the image border.
// Throws std::invalid_argument on violated preconditions and
// std::runtime_error if the solver has not converged after max_iters.
Image poisson_blend(const Image& fake, const Image& source, const Mask& mask,
                    PoissonStats* stats = nullptr, double tol = 1e-3,
                    int max_iters = 10000);

}  // namespace caddm
