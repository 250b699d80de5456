#pragma once

#include <cstddef>
#include <new>
#include <vector>

namespace caddm::nn {

// 64-byte aligned allocator. All buffers the linear-algebra kernels touch
// share one fixed alignment, so vector loop peeling (and with it the exact
// summation order) never depends on where the heap placed an allocation.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) {}

  T* allocate(size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t(64)));
  }
  void deallocate(T* p, size_t) { ::operator delete(p, std::align_val_t(64)); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const {
    return true;
  }
  template <typename U>
  bool operator!=(const AlignedAllocator<U>&) const {
    return false;
  }
};

using AlignedVec = std::vector<double, AlignedAllocator<double>>;

// CHW tensor of doubles.
struct Tensor {
  int ch = 0, h = 0, w = 0;
  AlignedVec v;

  Tensor() = default;
  Tensor(int c, int hh, int ww, double fill = 0.0)
      : ch(c), h(hh), w(ww),
        v(static_cast<size_t>(c) * static_cast<size_t>(hh) * static_cast<size_t>(ww), fill) {}

  void resize(int c, int hh, int ww) {
    ch = c;
    h = hh;
    w = ww;
    v.assign(static_cast<size_t>(c) * hh * ww, 0.0);
  }

  double& at(int c, int y, int x) {
    return v[(static_cast<size_t>(c) * h + y) * w + x];
  }
  double at(int c, int y, int x) const {
    return v[(static_cast<size_t>(c) * h + y) * w + x];
  }
  size_t size() const { return v.size(); }
  bool same_shape(const Tensor& o) const { return ch == o.ch && h == o.h && w == o.w; }
};

}  // namespace caddm::nn
