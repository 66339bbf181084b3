#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "oclmine/concur.hpp"
#include "oclmine/dataset.hpp"
#include "oclmine/dbscan.hpp"
#include "oclmine/errors.hpp"
#include "oclmine/point_state.hpp"
#include "oclmine/random.hpp"

namespace oclmine {

struct KmeansIteration;
using KmeansObserver = std::function<void(const KmeansIteration&)>;

struct KmeansParams {
  std::size_t k = 2;
  double tol = 1e-6;
  std::size_t max_iter = 100000;
  // Called after every Lloyd step on the coordinating thread.
  KmeansObserver observer;

  void validate(std::size_t n) const {
    if (k < 1) throw ValidationError("k must be >= 1");
    if (k > n) throw ValidationError("k must not exceed the number of points");
    if (k > std::numeric_limits<Label>::max()) throw ValidationError("k does not fit a 16-bit label");
    if (!(tol > 0.0)) throw ValidationError("tol must be positive");
    if (max_iter < 1) throw ValidationError("max_iter must be >= 1");
  }
};

struct KmeansResult {
  std::vector<Label> labels;
  std::vector<float> centers;  // k x d, row-major
  std::size_t iterations = 0;
  bool converged = false;
};

// Snapshot handed to KmeansObserver: labels from this step's assignment and
// the centers recomputed from them.
struct KmeansIteration {
  std::size_t iteration;
  std::span<const Label> labels;
  std::span<const float> centers;
  double displacement;
};

/// Picks k distinct point indices uniformly (partial Fisher-Yates) and copies
/// those rows as the initial centers.
inline std::vector<float> init_centers(const Dataset& ds, std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint32_t> idx(ds.size());
  std::iota(idx.begin(), idx.end(), 0u);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + uniform_index(rng, idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  std::vector<float> centers;
  centers.reserve(k * ds.features());
  for (std::size_t i = 0; i < k; ++i) {
    auto r = ds.row(idx[i]);
    centers.insert(centers.end(), r.begin(), r.end());
  }
  return centers;
}

// Nearest center by squared distance; ties go to the lower index.
inline Label nearest_center(const float* point, std::span<const float> centers, std::size_t k,
                            std::size_t d) {
  Label best = 0;
  float best_dist = squared_distance(point, centers.data(), d);
  for (std::size_t j = 1; j < k; ++j) {
    const float dist = squared_distance(point, centers.data() + j * d, d);
    if (dist < best_dist) {
      best_dist = dist;
      best = static_cast<Label>(j);
    }
  }
  return best;
}

/// Per-cluster coordinate sums in 128-bit fixed point.
///
/// Each float is converted to fixed point on its own (exactly, unless it is
/// below 2^-shift), and integer addition is associative, so the sums do not
/// depend on how points are split across workers or in which order partial
/// sums are merged. That keeps centers bitwise identical between backends.
class CenterSums {
 public:
  using Fixed = __int128;

  CenterSums() = default;
  CenterSums(std::size_t k, std::size_t d, int shift)
      : k_(k), d_(d), shift_(shift), sums_(k * d, 0), counts_(k, 0) {}

  // Largest shift for which n values of magnitude <= max_abs cannot overflow.
  static int shift_for(float max_abs, std::size_t n) {
    int exp = 0;
    std::frexp(max_abs, &exp);  // max_abs < 2^exp
    int log_n = 0;
    while ((std::size_t{1} << log_n) < std::max<std::size_t>(n, 1)) ++log_n;
    return 125 - exp - log_n;
  }

  static Fixed to_fixed(float x, int shift) {
    if (x == 0.0f) return 0;
    int exp = 0;
    const double frac = std::frexp(static_cast<double>(x), &exp);
    const auto mant = static_cast<std::int64_t>(std::ldexp(frac, 24));  // exact for floats
    const std::int64_t mag = mant < 0 ? -mant : mant;
    const int s = exp - 24 + shift;
    Fixed v;
    if (s >= 0) {
      v = static_cast<Fixed>(mag) << s;
    } else {
      v = -s >= 63 ? 0 : static_cast<Fixed>(mag >> -s);
    }
    return mant < 0 ? -v : v;
  }

  void clear() {
    std::fill(sums_.begin(), sums_.end(), 0);
    std::fill(counts_.begin(), counts_.end(), 0);
  }

  void add(Label cluster, const float* row) {
    Fixed* dst = sums_.data() + std::size_t{cluster} * d_;
    for (std::size_t f = 0; f < d_; ++f) dst[f] += to_fixed(row[f], shift_);
    ++counts_[cluster];
  }

  void merge(const CenterSums& other) {
    for (std::size_t i = 0; i < sums_.size(); ++i) sums_[i] += other.sums_[i];
    for (std::size_t j = 0; j < k_; ++j) counts_[j] += other.counts_[j];
  }

  std::uint64_t count(std::size_t cluster) const { return counts_[cluster]; }

  /// Replaces each non-empty cluster's center by its mean; empty clusters keep
  /// their center. Returns the summed absolute displacement over all
  /// coordinates.
  double update(std::span<float> centers) const {
    double displacement = 0.0;
    for (std::size_t j = 0; j < k_; ++j) {
      if (counts_[j] == 0) continue;
      for (std::size_t f = 0; f < d_; ++f) {
        const double sum = std::ldexp(static_cast<double>(sums_[j * d_ + f]), -shift_);
        const auto mean = static_cast<float>(sum / static_cast<double>(counts_[j]));
        displacement += std::fabs(static_cast<double>(mean) - static_cast<double>(centers[j * d_ + f]));
        centers[j * d_ + f] = mean;
      }
    }
    return displacement;
  }

 private:
  std::size_t k_ = 0;
  std::size_t d_ = 0;
  int shift_ = 0;
  std::vector<Fixed> sums_;
  std::vector<std::uint64_t> counts_;
};

// Assigns points [begin, end) and accumulates them into `sums`.
inline void assign_and_accumulate(const Dataset& ds, std::span<const float> centers, std::size_t k,
                                  std::size_t begin, std::size_t end, std::span<Label> labels,
                                  CenterSums& sums) {
  const std::size_t d = ds.features();
  for (std::size_t i = begin; i < end; ++i) {
    const float* row = ds.data() + i * d;
    const Label l = nearest_center(row, centers, k, d);
    labels[i] = l;
    sums.add(l, row);
  }
}

/// Lloyd iteration shared by every backend.
///
/// `step(centers, labels, sums)` must assign every point to its nearest
/// center, write the labels and leave the per-cluster sums in `sums`.
/// The loop stops once the summed absolute center displacement drops below
/// tol, or after max_iter steps.
template <class Step>
KmeansResult kmeans_lloyd(const Dataset& ds, const KmeansParams& params, std::uint64_t seed,
                          const CancellationToken* token, Step&& step) {
  params.validate(ds.size());
  KmeansResult result;
  result.centers = init_centers(ds, params.k, seed);
  result.labels.assign(ds.size(), 0);
  CenterSums sums(params.k, ds.features(), CenterSums::shift_for(ds.max_abs(), ds.size()));

  for (std::size_t iter = 1; iter <= params.max_iter; ++iter) {
    detail::check_token(token);
    sums.clear();
    step(std::span<const float>(result.centers), std::span<Label>(result.labels), sums);
    const double displacement = sums.update(result.centers);
    result.iterations = iter;
    if (params.observer) {
      params.observer({iter, result.labels, result.centers, displacement});
    }
    if (displacement < params.tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

/// Single-threaded reference Kmeans.
inline KmeansResult kmeans_single(const Dataset& ds, const KmeansParams& params, std::uint64_t seed,
                                  const CancellationToken* token = nullptr) {
  return kmeans_lloyd(ds, params, seed, token,
                      [&](std::span<const float> centers, std::span<Label> labels, CenterSums& sums) {
                        assign_and_accumulate(ds, centers, params.k, 0, ds.size(), labels, sums);
                      });
}

inline KmeansResult kmeans_single(const Dataset& ds, const KmeansParams& params, std::uint64_t seed,
                                  const CancellationToken& token) {
  return kmeans_single(ds, params, seed, &token);
}

// Within-cluster sum of squares, in double.
inline double within_cluster_ss(const Dataset& ds, std::span<const Label> labels,
                                std::span<const float> centers) {
  const std::size_t d = ds.features();
  double total = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const float* row = ds.data() + i * d;
    const float* c = centers.data() + std::size_t{labels[i]} * d;
    for (std::size_t f = 0; f < d; ++f) {
      const double diff = static_cast<double>(row[f]) - static_cast<double>(c[f]);
      total += diff * diff;
    }
  }
  return total;
}

}  // namespace oclmine
