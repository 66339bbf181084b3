#pragma once

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "oclmine/concur.hpp"
#include "oclmine/dataset.hpp"
#include "oclmine/errors.hpp"
#include "oclmine/point_state.hpp"

namespace oclmine {

/// min_pts counts neighbors within eps excluding the query point itself.
/// A point is a core point when that count is >= min_pts.
struct DbscanParams {
  float eps = 1.0f;
  std::size_t min_pts = 10;

  float eps_squared() const { return eps * eps; }

  void validate() const {
    if (!(eps > 0.0f) || !std::isfinite(eps)) throw ValidationError("eps must be positive");
    if (min_pts < 1) throw ValidationError("min_pts must be >= 1");
  }
};

// min_pts = 10 d, eps = sqrt(d).
inline DbscanParams derive_dbscan_params(std::size_t features) {
  if (features < 1) throw ValidationError("feature count must be >= 1");
  return {std::sqrt(static_cast<float>(features)), 10 * features};
}

enum class SearchPhase { Main, Expand };

/// Indices j != q with squared_distance(q, j) <= eps^2, ascending, restricted
/// to [begin, end). Appends to `out`.
inline void region_query_range(const Dataset& ds, std::size_t q, float eps2, std::size_t begin,
                               std::size_t end, std::vector<std::uint32_t>& out) {
  const std::size_t d = ds.features();
  const float* query = ds.row(q).data();
  const float* base = ds.data();
  for (std::size_t j = begin; j < end; ++j) {
    if (j == q) continue;
    if (squared_distance(query, base + j * d, d) <= eps2) out.push_back(static_cast<std::uint32_t>(j));
  }
}

inline std::vector<std::uint32_t> region_query(const Dataset& ds, std::size_t q, float eps) {
  std::vector<std::uint32_t> out;
  region_query_range(ds, q, eps * eps, 0, ds.size(), out);
  return out;
}

namespace detail {

inline void check_token(const CancellationToken* token) {
  if (token != nullptr && token->is_cancelled()) throw Aborted();
}

}  // namespace detail

/// Non-recursive DBSCAN driven by an explicit FIFO seed queue.
///
/// `Source` supplies neighborhoods and owns the per-point state words:
///
///   std::size_t query(SearchPhase, std::size_t q, std::vector<std::uint32_t>& out);
///       returns the neighbor count of q; when the count is >= min_pts, `out`
///       holds the neighbors in ascending index order.
///   std::span<PointState> states();
///       valid until the next query() call.
///
/// Points are visited in index order and clusters numbered 1, 2, ... in
/// discovery order. A point joins the cluster of the first core point that
/// reaches it; it is labelled when it enters the seed queue, so it is queued at
/// most once. Every backend runs this same routine, which is what makes their
/// labels comparable bit for bit.
template <class Source>
std::vector<Label> dbscan_traverse(Source& source, std::size_t n, std::size_t min_pts,
                                   const CancellationToken* token) {
  std::vector<std::uint32_t> neighbors;
  std::vector<std::uint32_t> seeds;
  Label cluster = kNoise;

  // Claims unclaimed neighbors for `cluster`; unvisited ones are queued for
  // expansion, noise points become border points.
  auto claim = [&](std::span<PointState> st) {
    for (std::uint32_t j : neighbors) {
      PointState& s = st[j];
      if (!s.visited()) {
        s.mark_visited();
        s.set_cluster(cluster);
        seeds.push_back(j);
      } else if (s.is_noise()) {
        s.set_cluster(cluster);
      }
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    detail::check_token(token);
    if (source.states()[i].visited()) continue;

    const std::size_t count = source.query(SearchPhase::Main, i, neighbors);
    auto st = source.states();
    st[i].mark_visited();
    if (count < min_pts) continue;  // noise for now; may become a border point

    if (cluster == kMaxClusterId) {
      throw CapacityError("more than " + std::to_string(kMaxClusterId) + " clusters");
    }
    ++cluster;
    st[i].set_cluster(cluster);
    seeds.clear();
    claim(st);

    for (std::size_t head = 0; head < seeds.size(); ++head) {
      detail::check_token(token);
      const std::uint32_t q = seeds[head];
      if (source.query(SearchPhase::Expand, q, neighbors) >= min_pts) claim(source.states());
    }
  }

  auto st = source.states();
  std::vector<Label> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = st[i].to_label();
  return labels;
}

namespace detail {

class SerialNeighborSource {
 public:
  SerialNeighborSource(const Dataset& ds, float eps2) : ds_(ds), eps2_(eps2), states_(ds.size()) {}

  std::size_t query(SearchPhase, std::size_t q, std::vector<std::uint32_t>& out) {
    out.clear();
    region_query_range(ds_, q, eps2_, 0, ds_.size(), out);
    return out.size();
  }

  std::span<PointState> states() { return states_; }

 private:
  const Dataset& ds_;
  float eps2_;
  std::vector<PointState> states_;
};

}  // namespace detail

/// Single-threaded reference DBSCAN. Returns one cluster id per point,
/// 0 = noise. Throws Aborted when `token` fires, CapacityError beyond 8191
/// clusters.
inline std::vector<Label> dbscan_single(const Dataset& ds, const DbscanParams& params,
                                        const CancellationToken* token = nullptr) {
  params.validate();
  detail::SerialNeighborSource source(ds, params.eps_squared());
  return dbscan_traverse(source, ds.size(), params.min_pts, token);
}

inline std::vector<Label> dbscan_single(const Dataset& ds, const DbscanParams& params,
                                        const CancellationToken& token) {
  return dbscan_single(ds, params, &token);
}

inline std::size_t count_clusters(std::span<const Label> labels) {
  Label top = 0;
  for (Label l : labels) top = std::max(top, l);
  return top;
}

}  // namespace oclmine
