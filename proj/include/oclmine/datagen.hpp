#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <vector>

#include "oclmine/dataset.hpp"
#include "oclmine/errors.hpp"
#include "oclmine/random.hpp"

namespace oclmine {

inline constexpr std::size_t kMaxFeatures = 64;

// Ranges for the randomly drawn blob parameters.
inline constexpr double kCenterLow = 0.0;
inline constexpr double kCenterHigh = 10.0;
inline constexpr double kSigmaLow = 0.25;
inline constexpr double kSigmaHigh = 1.25;

struct DatasetSpec {
  std::size_t features = 2;
  std::vector<std::size_t> cluster_sizes;
  std::uint64_t seed = 0;

  std::size_t total_points() const {
    return std::accumulate(cluster_sizes.begin(), cluster_sizes.end(), std::size_t{0});
  }

  void validate() const {
    if (features < 1 || features > kMaxFeatures) {
      throw ValidationError("features must be in [1, 64]");
    }
    if (cluster_sizes.empty()) throw ValidationError("at least one cluster is required");
    for (std::size_t s : cluster_sizes) {
      if (s == 0) throw ValidationError("cluster sizes must be positive");
    }
  }
};

// Generated cluster index per point, in post-shuffle order. Reporting only.
struct GroundTruth {
  std::vector<std::uint32_t> gen_label;
};

// The drawn parameters of one blob, kept for sanity checks on the sampler.
struct BlobParams {
  std::vector<double> center;
  std::vector<double> sigma;
};

struct GeneratedData {
  Dataset dataset;
  GroundTruth truth;
  std::vector<BlobParams> blobs;
};

/// Draws each cluster from an axis-aligned normal with a uniform random center
/// in [0,10]^d and a per-feature sigma in [0.25,1.25], rounds to float, then
/// shuffles all points. Same spec, same bytes.
inline GeneratedData generate(const DatasetSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t d = spec.features;
  const std::size_t n = spec.total_points();

  std::vector<float> values;
  values.reserve(n * d);
  std::vector<std::uint32_t> labels;
  labels.reserve(n);
  std::vector<BlobParams> blobs;
  blobs.reserve(spec.cluster_sizes.size());

  for (std::size_t c = 0; c < spec.cluster_sizes.size(); ++c) {
    BlobParams blob;
    blob.center.resize(d);
    blob.sigma.resize(d);
    for (std::size_t f = 0; f < d; ++f) blob.center[f] = uniform_real(rng, kCenterLow, kCenterHigh);
    for (std::size_t f = 0; f < d; ++f) blob.sigma[f] = uniform_real(rng, kSigmaLow, kSigmaHigh);
    for (std::size_t i = 0; i < spec.cluster_sizes[c]; ++i) {
      for (std::size_t f = 0; f < d; ++f) {
        values.push_back(static_cast<float>(blob.center[f] + blob.sigma[f] * standard_normal(rng)));
      }
      labels.push_back(static_cast<std::uint32_t>(c));
    }
    blobs.push_back(std::move(blob));
  }

  // Shuffle a permutation, then gather rows, so rows stay contiguous.
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  shuffle(std::span<std::uint32_t>(order), rng);

  std::vector<float> shuffled(n * d);
  GroundTruth truth;
  truth.gen_label.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = order[i];
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(src * d), d,
                shuffled.begin() + static_cast<std::ptrdiff_t>(i * d));
    truth.gen_label[i] = labels[src];
  }
  return {Dataset(n, d, shuffled), std::move(truth), std::move(blobs)};
}

// Header: x0,...,x{d-1},gen_label
inline void write_dataset_csv(std::ostream& out, const Dataset& ds, const GroundTruth& truth) {
  for (std::size_t f = 0; f < ds.features(); ++f) out << 'x' << f << ',';
  out << "gen_label\n";
  const auto old_precision = out.precision(9);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (float v : ds.row(i)) out << v << ',';
    out << truth.gen_label.at(i) << '\n';
  }
  out.precision(old_precision);
}

}  // namespace oclmine
