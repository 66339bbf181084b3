#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <new>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oclmine/errors.hpp"

namespace oclmine {

inline constexpr std::size_t kPageSize = 4096;

// Allocator returning page-aligned storage, so host-backed device buffers can
// alias it without a copy on integrated GPUs.
template <class T>
struct PageAlignedAllocator {
  using value_type = T;

  PageAlignedAllocator() = default;
  template <class U>
  PageAlignedAllocator(const PageAlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t count) {
    const std::size_t bytes = ((count * sizeof(T) + kPageSize - 1) / kPageSize) * kPageSize;
    void* p = std::aligned_alloc(kPageSize, bytes == 0 ? kPageSize : bytes);
    if (p == nullptr) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { std::free(p); }

  template <class U>
  bool operator==(const PageAlignedAllocator<U>&) const noexcept {
    return true;
  }
};

template <class T>
using AlignedVector = std::vector<T, PageAlignedAllocator<T>>;

/// Row-major single-precision matrix of n points by d features. Immutable once
/// constructed; every backend reads the same storage.
class Dataset {
 public:
  Dataset() = default;

  Dataset(std::size_t points, std::size_t features, std::span<const float> values)
      : n_(points), d_(features), values_(values.begin(), values.end()) {
    if (features == 0) throw ValidationError("dataset needs at least one feature");
    if (values.size() != points * features) {
      throw ValidationError("dataset value count " + std::to_string(values.size()) +
                            " != points * features");
    }
    for (float v : values_) {
      if (!std::isfinite(v)) throw ValidationError("dataset values must be finite");
    }
  }

  Dataset(std::size_t points, std::size_t features, std::initializer_list<float> values)
      : Dataset(points, features, std::span<const float>(values.begin(), values.size())) {}

  std::size_t size() const { return n_; }
  std::size_t features() const { return d_; }
  bool empty() const { return n_ == 0; }

  std::span<const float> row(std::size_t i) const { return {values_.data() + i * d_, d_}; }
  const float* data() const { return values_.data(); }
  std::span<const float> values() const { return {values_.data(), values_.size()}; }
  std::size_t bytes() const { return values_.size() * sizeof(float); }

  // Largest |value|; 0 for an empty dataset.
  float max_abs() const {
    float m = 0.0f;
    for (float v : values_) m = std::max(m, std::fabs(v));
    return m;
  }

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.n_ == b.n_ && a.d_ == b.d_ &&
           std::equal(a.values_.begin(), a.values_.end(), b.values_.begin(), b.values_.end());
  }

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  AlignedVector<float> values_;
};

/// Squared Euclidean distance with a fixed accumulation order (feature 0
/// first). The device kernels evaluate the same expression, so host and
/// device comparisons against eps^2 agree bit for bit.
inline float squared_distance(const float* a, const float* b, std::size_t d) {
  float acc = 0.0f;
  for (std::size_t f = 0; f < d; ++f) {
    const float diff = a[f] - b[f];
    acc += diff * diff;
  }
  return acc;
}

}  // namespace oclmine
