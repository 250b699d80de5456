#include "caddm/nn/layers.hpp"

#include <Eigen/Core>

namespace caddm::nn {

namespace {

using MatMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstMatMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

}  // namespace

void im2col(const Tensor& x, int k, int stride, int pad, AlignedVec& col) {
  const int oh = (x.h + 2 * pad - k) / stride + 1;
  const int ow = (x.w + 2 * pad - k) / stride + 1;
  const size_t rows = static_cast<size_t>(x.ch) * k * k;
  const size_t cols = static_cast<size_t>(oh) * ow;
  col.assign(rows * cols, 0.0);
  size_t r = 0;
  for (int c = 0; c < x.ch; ++c) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx, ++r) {
        double* dst = col.data() + r * cols;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= x.h) {
            dst += ow;
            continue;
          }
          const double* src = &x.v[(static_cast<size_t>(c) * x.h + iy) * x.w];
          for (int ox = 0; ox < ow; ++ox, ++dst) {
            const int ix = ox * stride - pad + kx;
            if (ix >= 0 && ix < x.w) *dst = src[ix];
          }
        }
      }
    }
  }
}

void col2im(const AlignedVec& col, int k, int stride, int pad, Tensor& dx) {
  const int oh = (dx.h + 2 * pad - k) / stride + 1;
  const int ow = (dx.w + 2 * pad - k) / stride + 1;
  const size_t cols = static_cast<size_t>(oh) * ow;
  std::fill(dx.v.begin(), dx.v.end(), 0.0);
  size_t r = 0;
  for (int c = 0; c < dx.ch; ++c) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx, ++r) {
        const double* src = col.data() + r * cols;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= dx.h) {
            src += ow;
            continue;
          }
          double* dst = &dx.v[(static_cast<size_t>(c) * dx.h + iy) * dx.w];
          for (int ox = 0; ox < ow; ++ox, ++src) {
            const int ix = ox * stride - pad + kx;
            if (ix >= 0 && ix < dx.w) dst[ix] += *src;
          }
        }
      }
    }
  }
}

void Conv2d::forward(const double* params, const Tensor& x, Tensor& y,
                     AlignedVec& colbuf) const {
  const int oh = out_h(x.h), ow = out_w(x.w);
  y.resize(out_c, oh, ow);
  im2col(x, k, stride, pad, colbuf);
  const Eigen::Index rows = static_cast<Eigen::Index>(in_c) * k * k;
  const Eigen::Index cols = static_cast<Eigen::Index>(oh) * ow;
  ConstMatMap W(params + w_off, out_c, rows);
  ConstMatMap col(colbuf.data(), rows, cols);
  MatMap Y(y.v.data(), out_c, cols);
  Y.noalias() = W * col;
  for (int c = 0; c < out_c; ++c) Y.row(c).array() += params[b_off + static_cast<size_t>(c)];
}

void Conv2d::backward(const double* params, const Tensor& x, const Tensor& dy,
                      Tensor* dx, double* grad, AlignedVec& colbuf) const {
  const int oh = dy.h, ow = dy.w;
  const Eigen::Index rows = static_cast<Eigen::Index>(in_c) * k * k;
  const Eigen::Index cols = static_cast<Eigen::Index>(oh) * ow;

  im2col(x, k, stride, pad, colbuf);
  ConstMatMap col(colbuf.data(), rows, cols);
  ConstMatMap dY(dy.v.data(), out_c, cols);

  MatMap gW(grad + w_off, out_c, rows);
  gW.noalias() += dY * col.transpose();
  VecMap gb(grad + b_off, out_c);
  gb.noalias() += dY.rowwise().sum();

  if (dx) {
    dx->resize(in_c, x.h, x.w);
    ConstMatMap W(params + w_off, out_c, rows);
    // Reuse the column buffer for the input-gradient columns.
    AlignedVec dcol(static_cast<size_t>(rows) * cols);
    MatMap dC(dcol.data(), rows, cols);
    dC.noalias() = W.transpose() * dY;
    col2im(dcol, k, stride, pad, *dx);
  }
}

void Linear::forward(const double* params, const AlignedVec& x, AlignedVec& y) const {
  y.assign(static_cast<size_t>(out_dim), 0.0);
  ConstMatMap W(params + w_off, out_dim, in_dim);
  ConstVecMap xv(x.data(), in_dim);
  VecMap yv(y.data(), out_dim);
  yv.noalias() = W * xv;
  for (int i = 0; i < out_dim; ++i) y[static_cast<size_t>(i)] += params[b_off + static_cast<size_t>(i)];
}

void Linear::backward(const double* params, const AlignedVec& x,
                      const AlignedVec& dy, AlignedVec* dx, double* grad) const {
  ConstVecMap xv(x.data(), in_dim);
  ConstVecMap dyv(dy.data(), out_dim);
  MatMap gW(grad + w_off, out_dim, in_dim);
  gW.noalias() += dyv * xv.transpose();
  VecMap gb(grad + b_off, out_dim);
  gb.noalias() += dyv;
  if (dx) {
    dx->assign(static_cast<size_t>(in_dim), 0.0);
    ConstMatMap W(params + w_off, out_dim, in_dim);
    VecMap dxv(dx->data(), in_dim);
    dxv.noalias() = W.transpose() * dyv;
  }
}

void relu_forward(const Tensor& z, Tensor& a) {
  a.resize(z.ch, z.h, z.w);
  for (size_t i = 0; i < z.size(); ++i) a.v[i] = z.v[i] > 0.0 ? z.v[i] : 0.0;
}

void relu_backward(const Tensor& z, const Tensor& da, Tensor& dz) {
  dz.resize(z.ch, z.h, z.w);
  for (size_t i = 0; i < z.size(); ++i) dz.v[i] = z.v[i] > 0.0 ? da.v[i] : 0.0;
}

void global_avg_pool(const Tensor& x, AlignedVec& y) {
  y.assign(static_cast<size_t>(x.ch), 0.0);
  const double inv = 1.0 / (static_cast<double>(x.h) * x.w);
  for (int c = 0; c < x.ch; ++c) {
    double s = 0.0;
    const double* p = &x.v[static_cast<size_t>(c) * x.h * x.w];
    for (int i = 0; i < x.h * x.w; ++i) s += p[i];
    y[static_cast<size_t>(c)] = s * inv;
  }
}

void global_avg_pool_backward(const AlignedVec& dy, Tensor& dx) {
  const double inv = 1.0 / (static_cast<double>(dx.h) * dx.w);
  for (int c = 0; c < dx.ch; ++c) {
    double* p = &dx.v[static_cast<size_t>(c) * dx.h * dx.w];
    const double g = dy[static_cast<size_t>(c)] * inv;
    for (int i = 0; i < dx.h * dx.w; ++i) p[i] = g;
  }
}

}  // namespace caddm::nn
