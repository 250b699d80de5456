#pragma once

#include <string>
#include <vector>

#include "caddm/nn/tensor.hpp"

namespace caddm::nn {

// Layers are shape descriptors over a flat parameter vector owned by the
// network; forward/backward take the parameter base pointer explicitly so
// that weights stay shared and read-only across worker threads while each
// worker accumulates into its own gradient buffer.

struct Conv2d {
  int in_c = 0, out_c = 0, k = 3, stride = 1, pad = 0;
  size_t w_off = 0, b_off = 0;  // into the flat parameter vector

  size_t w_count() const {
    return static_cast<size_t>(out_c) * in_c * k * k;
  }
  size_t b_count() const { return static_cast<size_t>(out_c); }
  int out_h(int in_h) const { return (in_h + 2 * pad - k) / stride + 1; }
  int out_w(int in_w) const { return (in_w + 2 * pad - k) / stride + 1; }

  void forward(const double* params, const Tensor& x, Tensor& y,
               AlignedVec& colbuf) const;
  // Accumulates parameter gradients into grad (same layout as params);
  // writes input gradients into dx when dx != nullptr.
  void backward(const double* params, const Tensor& x, const Tensor& dy,
                Tensor* dx, double* grad, AlignedVec& colbuf) const;
};

struct Linear {
  int in_dim = 0, out_dim = 0;
  size_t w_off = 0, b_off = 0;

  size_t w_count() const { return static_cast<size_t>(out_dim) * in_dim; }
  size_t b_count() const { return static_cast<size_t>(out_dim); }

  void forward(const double* params, const AlignedVec& x, AlignedVec& y) const;
  void backward(const double* params, const AlignedVec& x,
                const AlignedVec& dy, AlignedVec* dx, double* grad) const;
};

void relu_forward(const Tensor& z, Tensor& a);
// dz = da .* (z > 0)
void relu_backward(const Tensor& z, const Tensor& da, Tensor& dz);

void global_avg_pool(const Tensor& x, AlignedVec& y);
void global_avg_pool_backward(const AlignedVec& dy, Tensor& dx);

void im2col(const Tensor& x, int k, int stride, int pad, AlignedVec& col);
void col2im(const AlignedVec& col, int k, int stride, int pad, Tensor& dx);

}  // namespace caddm::nn
