#pragma once

#include <algorithm>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <system_error>
#include <thread>
#include <vector>

#include "oclmine/concur.hpp"
#include "oclmine/dataset.hpp"
#include "oclmine/dbscan.hpp"
#include "oclmine/errors.hpp"
#include "oclmine/kmeans.hpp"
#include "oclmine/timing.hpp"

namespace oclmine {

struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

/// Splits [0, n) into `workers` contiguous ranges; the first n % workers
/// ranges carry one extra item.
inline std::vector<IndexRange> partition(std::size_t n, std::size_t workers) {
  if (workers < 1) throw ValidationError("worker count must be >= 1");
  std::vector<IndexRange> ranges;
  ranges.reserve(workers);
  const std::size_t base = n / workers;
  const std::size_t extra = n % workers;
  std::size_t begin = 0;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t len = base + (w < extra ? 1 : 0);
    ranges.push_back({begin, begin + len});
    begin += len;
  }
  return ranges;
}

// Hardware cores minus one, at least one.
inline std::size_t default_worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 1 ? hw - 1 : 1;
}

struct WorkerPoolConfig {
  std::size_t workers = default_worker_count();
};

/// Fixed set of threads that execute one phase at a time.
///
/// run() publishes a job, wakes every worker, and returns once all of them
/// have finished it. Threads live until the team is destroyed, so the cost of
/// creating them is paid once per algorithm invocation.
class WorkerTeam {
 public:
  using Job = std::function<void(std::size_t worker)>;

  explicit WorkerTeam(std::size_t workers) {
    if (workers < 1) throw ValidationError("worker count must be >= 1");
    threads_.reserve(workers);
    try {
      for (std::size_t w = 0; w < workers; ++w) threads_.emplace_back([this, w] { loop(w); });
    } catch (const std::system_error& e) {
      shutdown();
      throw SetupError(std::string("failed to launch worker: ") + e.what());
    }
  }

  WorkerTeam(const WorkerTeam&) = delete;
  WorkerTeam& operator=(const WorkerTeam&) = delete;

  ~WorkerTeam() { shutdown(); }

  std::size_t size() const { return threads_.size(); }

  // Runs `job` on every worker and waits. Rethrows the first worker exception.
  void run(const Job& job) {
    std::unique_lock guard(mutex_);
    job_ = &job;
    pending_ = threads_.size();
    error_ = nullptr;
    ++generation_;
    start_cv_.notify_all();
    done_cv_.wait(guard, [&] { return pending_ == 0; });
    job_ = nullptr;
    if (error_) std::rethrow_exception(std::exchange(error_, nullptr));
  }

  void shutdown() {
    {
      std::lock_guard guard(mutex_);
      if (stopping_) return;
      stopping_ = true;
    }
    start_cv_.notify_all();
    for (auto& t : threads_) {
      if (t.joinable()) t.join();
    }
  }

 private:
  void loop(std::size_t worker) {
    std::uint64_t seen = 0;
    for (;;) {
      const Job* job = nullptr;
      {
        std::unique_lock guard(mutex_);
        start_cv_.wait(guard, [&] { return stopping_ || generation_ != seen; });
        if (stopping_) return;
        seen = generation_;
        job = job_;
      }
      std::exception_ptr failure;
      try {
        (*job)(worker);
      } catch (...) {
        failure = std::current_exception();
      }
      std::lock_guard guard(mutex_);
      if (failure && !error_) error_ = failure;
      if (--pending_ == 0) done_cv_.notify_one();
    }
  }

  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const Job* job_ = nullptr;
  std::size_t pending_ = 0;
  std::uint64_t generation_ = 0;
  bool stopping_ = false;
  std::exception_ptr error_;
};

namespace detail {

// Region queries split over a worker team. Each worker scans its own range
// into private scratch; concatenating the scratch in range order yields the
// ascending neighbor list.
class PartitionedNeighborSource {
 public:
  PartitionedNeighborSource(const Dataset& ds, float eps2, WorkerTeam& main_team,
                            WorkerTeam& expand_team, const CancellationToken* token)
      : ds_(ds),
        eps2_(eps2),
        main_(main_team),
        expand_(expand_team),
        token_(token),
        ranges_(partition(ds.size(), main_team.size())),
        scratch_(main_team.size()),
        states_(ds.size()) {}

  std::size_t query(SearchPhase phase, std::size_t q, std::vector<std::uint32_t>& out) {
    WorkerTeam& team = phase == SearchPhase::Main ? main_ : expand_;
    team.run([&](std::size_t w) {
      scratch_[w].clear();
      if (token_ != nullptr && token_->is_cancelled()) return;
      region_query_range(ds_, q, eps2_, ranges_[w].begin, ranges_[w].end, scratch_[w]);
    });
    detail::check_token(token_);
    out.clear();
    for (const auto& part : scratch_) out.insert(out.end(), part.begin(), part.end());
    return out.size();
  }

  std::span<PointState> states() { return states_; }

 private:
  const Dataset& ds_;
  float eps2_;
  WorkerTeam& main_;
  WorkerTeam& expand_;
  const CancellationToken* token_;
  std::vector<IndexRange> ranges_;
  std::vector<std::vector<std::uint32_t>> scratch_;
  std::vector<PointState> states_;
};

}  // namespace detail

/// Multithreaded DBSCAN. Traversal is the serial one; only neighbor searches
/// are split across workers. Two worker teams are started, one serving the
/// main loop and one serving cluster expansion. Labels are identical to
/// dbscan_single.
inline Timed<std::vector<Label>> dbscan_parallel(const Dataset& ds, const DbscanParams& params,
                                                 const CancellationToken* token,
                                                 const WorkerPoolConfig& pool) {
  params.validate();
  const auto start = Clock::now();
  WorkerTeam main_team(pool.workers);
  WorkerTeam expand_team(pool.workers);
  const auto ready = Clock::now();

  std::vector<Label> labels;
  Clock::time_point done;
  try {
    detail::PartitionedNeighborSource source(ds, params.eps_squared(), main_team, expand_team, token);
    labels = dbscan_traverse(source, ds.size(), params.min_pts, token);
    done = Clock::now();
  } catch (...) {
    main_team.shutdown();
    expand_team.shutdown();
    throw;
  }
  main_team.shutdown();
  expand_team.shutdown();
  const auto end = Clock::now();
  return {std::move(labels), RunTiming::from_marks(start, ready, done, end)};
}

/// Multithreaded Lloyd Kmeans. Each iteration every worker labels its range
/// and accumulates partial sums; the coordinator merges the partials in worker
/// order and updates the centers. Labels and centers are identical to
/// kmeans_single for the same seed.
inline Timed<KmeansResult> kmeans_parallel(const Dataset& ds, const KmeansParams& params,
                                           std::uint64_t seed, const CancellationToken* token,
                                           const WorkerPoolConfig& pool) {
  params.validate(ds.size());
  const auto start = Clock::now();
  WorkerTeam team(pool.workers);
  const auto ready = Clock::now();

  const auto ranges = partition(ds.size(), team.size());
  const int shift = CenterSums::shift_for(ds.max_abs(), ds.size());
  std::vector<CenterSums> partials(team.size(), CenterSums(params.k, ds.features(), shift));

  KmeansResult result;
  Clock::time_point done;
  try {
    result = kmeans_lloyd(
        ds, params, seed, token,
        [&](std::span<const float> centers, std::span<Label> labels, CenterSums& sums) {
          team.run([&](std::size_t w) {
            partials[w].clear();
            if (token != nullptr && token->is_cancelled()) return;
            assign_and_accumulate(ds, centers, params.k, ranges[w].begin, ranges[w].end, labels,
                                  partials[w]);
          });
          detail::check_token(token);
          for (const auto& p : partials) sums.merge(p);
        });
    done = Clock::now();
  } catch (...) {
    team.shutdown();
    throw;
  }
  team.shutdown();
  const auto end = Clock::now();
  return {std::move(result), RunTiming::from_marks(start, ready, done, end)};
}

}  // namespace oclmine
