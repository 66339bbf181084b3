#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <type_traits>
#include <vector>

#include "oclmine/concur.hpp"
#include "oclmine/datagen.hpp"
#include "oclmine/dbscan.hpp"
#include "oclmine/errors.hpp"
#include "oclmine/gpubackend.hpp"
#include "oclmine/kmeans.hpp"
#include "oclmine/parbackend.hpp"
#include "oclmine/random.hpp"
#include "oclmine/timing.hpp"

namespace oclmine::bench {

struct GridTuple {
  std::size_t features = 0;
  std::size_t clusters = 0;
  std::size_t cluster_size = 0;

  std::string label() const {
    return "f" + std::to_string(features) + "-c" + std::to_string(clusters) + "-s" + std::to_string(cluster_size);
  }
  std::size_t points() const { return clusters * cluster_size; }
  friend auto operator<=>(const GridTuple&, const GridTuple&) = default;
};

struct GridSpec {
  std::vector<std::size_t> features{1, 2, 4};
  std::vector<std::size_t> clusters{2, 4, 6, 8};
  std::vector<std::size_t> sizes{128, 256, 512, 1024, 2048};
  std::size_t passes = 70;
  std::uint64_t master_seed = 20211;

  // Features outermost, cluster sizes innermost.
  std::vector<GridTuple> tuples() const {
    std::vector<GridTuple> out;
    for (auto f : features) {
      for (auto c : clusters) {
        for (auto s : sizes) out.push_back({f, c, s});
      }
    }
    return out;
  }

  void validate() const {
    if (features.empty() || clusters.empty() || sizes.empty()) throw ValidationError("grid axes must be non-empty");
    for (auto f : features) {
      if (f < 1 || f > kMaxFeatures) throw ValidationError("features must be in [1, 64]");
    }
    for (auto c : clusters) {
      if (c < 1) throw ValidationError("cluster counts must be positive");
    }
    for (auto s : sizes) {
      if (s < 1) throw ValidationError("cluster sizes must be positive");
    }
    if (passes < 1) throw ValidationError("passes must be >= 1");
  }
};

/// Parses a grid axis: a comma list ("1,2,4"), a doubling range
/// ("128..2048" = 128,256,...,2048) or a mix of both ("2,8..32").
inline std::vector<std::size_t> parse_axis(const std::string& text) {
  std::vector<std::size_t> out;
  auto number = [&](const std::string& s) -> std::size_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      throw ValidationError("bad axis value '" + s + "' in '" + text + "'");
    }
    const std::size_t v = std::stoull(s);
    if (v == 0) throw ValidationError("axis values must be positive: '" + text + "'");
    return v;
  };
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    if (const auto dots = item.find(".."); dots != std::string::npos) {
      const std::size_t lo = number(item.substr(0, dots));
      const std::size_t hi = number(item.substr(dots + 2));
      if (lo > hi) throw ValidationError("empty range '" + item + "'");
      for (std::size_t v = lo; v <= hi; v *= 2) out.push_back(v);
    } else {
      out.push_back(number(item));
    }
    pos = comma + 1;
  }
  return out;
}

enum class Algorithm { Dbscan, Kmeans };
enum class RunStatus { Completed, Aborted, Error };
enum class Verify { Ok, Mismatch, Skipped };

inline const char* to_string(Algorithm a) { return a == Algorithm::Dbscan ? "dbscan" : "kmeans"; }
inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::Aborted: return "aborted";
    case RunStatus::Error: return "error";
  }
  return "?";
}
inline const char* to_string(Verify v) {
  switch (v) {
    case Verify::Ok: return "ok";
    case Verify::Mismatch: return "mismatch";
    case Verify::Skipped: return "skipped";
  }
  return "?";
}

/// One timed (backend, algorithm) execution within a pass. setup_ns covers
/// everything outside the algorithm interval (resource setup and teardown),
/// so total_ns == wall_ns + setup_ns.
struct TimingRecord {
  GridTuple tuple;
  std::size_t pass = 0;
  std::string backend;
  Algorithm algo = Algorithm::Dbscan;
  std::int64_t wall_ns = 0;
  std::int64_t setup_ns = 0;
  std::int64_t total_ns = 0;
  // Harness-side span around the backend call; always >= total_ns.
  std::int64_t outer_ns = 0;
  RunStatus status = RunStatus::Completed;
  Verify verify = Verify::Skipped;
  std::size_t order = 0;  // position in the pass's shuffled execution order
  std::string message;

  bool verify_ok() const { return verify == Verify::Ok; }
  bool accounting_holds() const { return total_ns == wall_ns + setup_ns && total_ns <= outer_ns; }
};

/// A clustering implementation under test.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  virtual Timed<std::vector<Label>> dbscan(const Dataset& ds, const DbscanParams& params,
                                           const CancellationToken& token) = 0;
  virtual Timed<KmeansResult> kmeans(const Dataset& ds, const KmeansParams& params, std::uint64_t seed,
                                     const CancellationToken& token) = 0;
};

class SingleBackend final : public Backend {
 public:
  std::string name() const override { return "single"; }

  Timed<std::vector<Label>> dbscan(const Dataset& ds, const DbscanParams& p, const CancellationToken& t) override {
    const auto start = Clock::now();
    auto labels = dbscan_single(ds, p, &t);
    const auto done = Clock::now();
    return {std::move(labels), RunTiming::from_marks(start, start, done, done)};
  }

  Timed<KmeansResult> kmeans(const Dataset& ds, const KmeansParams& p, std::uint64_t seed,
                             const CancellationToken& t) override {
    const auto start = Clock::now();
    auto result = kmeans_single(ds, p, seed, &t);
    const auto done = Clock::now();
    return {std::move(result), RunTiming::from_marks(start, start, done, done)};
  }
};

class MultiBackend final : public Backend {
 public:
  explicit MultiBackend(std::size_t workers = default_worker_count()) : pool_{workers} {}
  std::string name() const override { return "multi"; }
  std::size_t workers() const { return pool_.workers; }

  Timed<std::vector<Label>> dbscan(const Dataset& ds, const DbscanParams& p, const CancellationToken& t) override {
    return dbscan_parallel(ds, p, &t, pool_);
  }
  Timed<KmeansResult> kmeans(const Dataset& ds, const KmeansParams& p, std::uint64_t seed,
                             const CancellationToken& t) override {
    return kmeans_parallel(ds, p, seed, &t, pool_);
  }

 private:
  WorkerPoolConfig pool_;
};

/// Sets up a fresh device context for every run, compiling only the programs
/// that algorithm needs; context setup and teardown count as setup time.
class GpuBackend final : public Backend {
 public:
  GpuBackend(ocl::Loader& loader, gpu::KernelSourceBundle sources, gpu::GpuOptions options = {})
      : loader_(loader), sources_(std::move(sources)), options_(options) {}

  std::string name() const override { return "gpu"; }

  Timed<std::vector<Label>> dbscan(const Dataset& ds, const DbscanParams& p, const CancellationToken& t) override {
    gpu::KernelSourceBundle only = sources_;
    only.kmeans_assign.clear();
    return with_context(only, [&](gpu::GpuContext& ctx) { return gpu::dbscan_gpu(ctx, ds, p, &t); });
  }

  Timed<KmeansResult> kmeans(const Dataset& ds, const KmeansParams& p, std::uint64_t seed,
                             const CancellationToken& t) override {
    gpu::KernelSourceBundle only = sources_;
    only.dbscan_main.clear();
    only.dbscan_expand.clear();
    return with_context(only, [&](gpu::GpuContext& ctx) { return gpu::kmeans_gpu(ctx, ds, p, seed, &t); });
  }

 private:
  template <class Run>
  std::invoke_result_t<Run&, gpu::GpuContext&> with_context(const gpu::KernelSourceBundle& sources, Run&& run) {
    const auto start = Clock::now();
    gpu::GpuContext ctx = gpu::gpu_setup(loader_, sources, options_);
    auto result = [&] {
      try {
        return run(ctx);
      } catch (...) {
        gpu::gpu_teardown(ctx);
        throw;
      }
    }();
    gpu::gpu_teardown(ctx);
    result.timing = result.timing.widened(start, Clock::now());
    return result;
  }

  ocl::Loader& loader_;
  gpu::KernelSourceBundle sources_;
  gpu::GpuOptions options_;
};

/// True iff both label arrays are element-wise identical. Arrays of different
/// length are a caller error.
inline bool verify_dbscan(std::span<const Label> reference, std::span<const Label> candidate) {
  if (reference.size() != candidate.size()) {
    throw ValidationError("label arrays differ in length: " + std::to_string(reference.size()) + " vs " +
                          std::to_string(candidate.size()));
  }
  return std::equal(reference.begin(), reference.end(), candidate.begin());
}

struct RunOptions {
  // Shared with every backend; reset between passes, so a cancel aborts the
  // rest of the current pass only.
  CancellationToken* token = nullptr;
  // Fire the token once, this long after the sweep starts.
  std::optional<std::chrono::milliseconds> cancel_after;
  // Observer for streaming progress.
  std::function<void(const TimingRecord&)> on_record;
};

struct PassPlan {
  std::uint64_t dataset_seed;
  std::uint64_t kmeans_seed;
  std::uint64_t order_seed;
};

// Seeds depend on the tuple's values (not its position), so a tuple sees the
// same datasets whatever grid it is part of.
inline PassPlan plan_pass(std::uint64_t master, const GridTuple& t, std::size_t pass) {
  const std::uint64_t key = (std::uint64_t{t.features} << 48) ^ (std::uint64_t{t.clusters} << 32) ^ t.cluster_size;
  return {derive_seed(master, key, pass, 0), derive_seed(master, key, pass, 1), derive_seed(master, key, pass, 2)};
}

inline DatasetSpec dataset_spec_for(const GridTuple& t, std::uint64_t seed) {
  return {t.features, std::vector<std::size_t>(t.clusters, t.cluster_size), seed};
}

namespace detail {

class CancelTimer {
 public:
  CancelTimer(CancellationToken& token, std::chrono::milliseconds delay)
      : thread_([this, &token, delay] {
          std::unique_lock guard(mutex_);
          if (!cv_.wait_for(guard, delay, [&] { return stop_; })) token.cancel();
        }) {}

  ~CancelTimer() {
    {
      std::lock_guard guard(mutex_);
      stop_ = true;
    }
    cv_.notify_all();
    thread_.join();
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  bool stop_ = false;
  std::thread thread_;
};

}  // namespace detail

/// Sweeps every tuple for `spec.passes` passes. Each pass draws one dataset
/// that every method runs on, shuffles the (backend, algorithm) order, times
/// each run, then checks every backend's labels against the "single" backend
/// (when it is part of the set). Failures become records; the sweep goes on.
inline std::vector<TimingRecord> run_grid(const GridSpec& spec, std::span<Backend* const> backends,
                                          const RunOptions& options = {}) {
  spec.validate();
  if (backends.empty()) throw ValidationError("at least one backend is required");

  CancellationToken local_token;
  CancellationToken& token = options.token != nullptr ? *options.token : local_token;
  std::optional<detail::CancelTimer> timer;
  if (options.cancel_after) timer.emplace(token, *options.cancel_after);

  const auto tuples = spec.tuples();
  std::vector<TimingRecord> records;
  records.reserve(spec.passes * tuples.size() * backends.size() * 2);

  struct Method {
    Backend* backend;
    Algorithm algo;
  };

  for (std::size_t pass = 0; pass < spec.passes; ++pass) {
    if (pass > 0) token.reset();
    for (const GridTuple& tuple : tuples) {
      const PassPlan plan = plan_pass(spec.master_seed, tuple, pass);
      const Dataset ds = generate(dataset_spec_for(tuple, plan.dataset_seed)).dataset;
      const DbscanParams dbscan_params = derive_dbscan_params(tuple.features);
      KmeansParams kmeans_params;
      kmeans_params.k = tuple.clusters;

      std::vector<Method> methods;
      for (Backend* b : backends) {
        methods.push_back({b, Algorithm::Dbscan});
        methods.push_back({b, Algorithm::Kmeans});
      }
      Rng order_rng(plan.order_seed);
      shuffle(std::span<Method>(methods), order_rng);

      const std::size_t first = records.size();
      std::vector<std::optional<std::vector<Label>>> labels(methods.size());
      for (std::size_t m = 0; m < methods.size(); ++m) {
        TimingRecord rec;
        rec.tuple = tuple;
        rec.pass = pass;
        rec.backend = methods[m].backend->name();
        rec.algo = methods[m].algo;
        rec.order = m;
        const auto outer_start = Clock::now();
        try {
          RunTiming timing;
          if (rec.algo == Algorithm::Dbscan) {
            auto r = methods[m].backend->dbscan(ds, dbscan_params, token);
            labels[m] = std::move(r.value);
            timing = r.timing;
          } else {
            auto r = methods[m].backend->kmeans(ds, kmeans_params, plan.kmeans_seed, token);
            labels[m] = std::move(r.value.labels);
            timing = r.timing;
          }
          rec.outer_ns = elapsed_ns(outer_start, Clock::now());
          rec.wall_ns = timing.wall_ns;
          rec.setup_ns = timing.overhead_ns();
          rec.total_ns = timing.total_ns();
        } catch (const Aborted& e) {
          rec.status = RunStatus::Aborted;
          rec.message = e.what();
        } catch (const std::exception& e) {
          rec.status = RunStatus::Error;
          rec.message = e.what();
        }
        if (rec.status != RunStatus::Completed) {
          rec.outer_ns = elapsed_ns(outer_start, Clock::now());
          rec.wall_ns = rec.outer_ns;
          rec.setup_ns = 0;
          rec.total_ns = rec.outer_ns;
        }
        records.push_back(std::move(rec));
      }

      // Verification happens after the whole pass so the reference can run in
      // any position of the shuffled order.
      for (Algorithm algo : {Algorithm::Dbscan, Algorithm::Kmeans}) {
        const std::vector<Label>* reference = nullptr;
        for (std::size_t m = 0; m < methods.size(); ++m) {
          if (methods[m].algo == algo && methods[m].backend->name() == "single" && labels[m]) reference = &*labels[m];
        }
        for (std::size_t m = 0; m < methods.size(); ++m) {
          if (methods[m].algo != algo) continue;
          TimingRecord& rec = records[first + m];
          if (rec.status != RunStatus::Completed || reference == nullptr) continue;
          try {
            rec.verify = verify_dbscan(*reference, *labels[m]) ? Verify::Ok : Verify::Mismatch;
          } catch (const std::exception& e) {
            rec.status = RunStatus::Error;
            rec.message = e.what();
          }
        }
      }
      if (options.on_record) {
        for (std::size_t i = first; i < records.size(); ++i) options.on_record(records[i]);
      }
    }
  }
  return records;
}

// ---------------------------------------------------------------------------
// Statistics

/// Linear-interpolation quantile of sorted data (the spreadsheet QUARTILE.INC
/// rule): position (n - 1) p, interpolated between neighbors. The median of
/// an even-sized sample is therefore the mean of the two middle values.
inline double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ValidationError("quantile of an empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct Stats {
  std::size_t count = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

inline Stats describe(std::vector<double> values) {
  if (values.empty()) throw ValidationError("cannot describe an empty sample");
  std::sort(values.begin(), values.end());
  return {values.size(),           values.front(), quantile_sorted(values, 0.25), quantile_sorted(values, 0.5),
          quantile_sorted(values, 0.75), values.back()};
}

enum class Interval { Wall, Setup };
inline const char* to_string(Interval i) { return i == Interval::Wall ? "wall" : "setup"; }

struct SummaryRow {
  GridTuple tuple;
  std::string backend;
  Algorithm algo = Algorithm::Dbscan;
  Interval interval = Interval::Wall;
  Stats stats;
};

/// Per (tuple, backend, algorithm, interval) statistics over Completed
/// records, in nanoseconds.
inline std::vector<SummaryRow> summarize(std::span<const TimingRecord> records) {
  if (records.empty()) throw ValidationError("no records to summarize");
  using Key = std::tuple<GridTuple, std::string, Algorithm, Interval>;
  std::map<Key, std::vector<double>> groups;
  for (const auto& r : records) {
    if (r.status != RunStatus::Completed) continue;
    groups[{r.tuple, r.backend, r.algo, Interval::Wall}].push_back(static_cast<double>(r.wall_ns));
    groups[{r.tuple, r.backend, r.algo, Interval::Setup}].push_back(static_cast<double>(r.setup_ns));
  }
  std::vector<SummaryRow> rows;
  rows.reserve(groups.size());
  for (auto& [key, values] : groups) {
    rows.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key), describe(std::move(values))});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV output

inline constexpr const char* kRawHeader = "tuple,pass,backend,algo,wall_ns,setup_ns,status,verify";

inline void write_raw_csv(std::ostream& out, std::span<const TimingRecord> records) {
  out << kRawHeader << '\n';
  for (const auto& r : records) {
    out << r.tuple.label() << ',' << r.pass << ',' << r.backend << ',' << to_string(r.algo) << ',' << r.wall_ns << ','
        << r.setup_ns << ',' << to_string(r.status) << ',' << to_string(r.verify) << '\n';
  }
}

inline void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << "tuple,features,clusters,size,backend,algo,interval,count,min_ns,q1_ns,median_ns,q3_ns,max_ns\n";
  const auto old_precision = out.precision(15);
  for (const auto& r : rows) {
    out << r.tuple.label() << ',' << r.tuple.features << ',' << r.tuple.clusters << ',' << r.tuple.cluster_size << ','
        << r.backend << ',' << to_string(r.algo) << ',' << to_string(r.interval) << ',' << r.stats.count << ','
        << r.stats.min << ',' << r.stats.q1 << ',' << r.stats.median << ',' << r.stats.q3 << ',' << r.stats.max
        << '\n';
  }
  out.precision(old_precision);
}

// Tukey box-plot geometry: whiskers at the most extreme values within
// 1.5 IQR of the quartiles.
inline void write_boxplot_csv(std::ostream& out, std::span<const TimingRecord> records,
                              std::span<const SummaryRow> rows) {
  using Key = std::tuple<GridTuple, std::string, Algorithm, Interval>;
  std::map<Key, std::vector<double>> groups;
  for (const auto& r : records) {
    if (r.status != RunStatus::Completed) continue;
    groups[{r.tuple, r.backend, r.algo, Interval::Wall}].push_back(static_cast<double>(r.wall_ns));
    groups[{r.tuple, r.backend, r.algo, Interval::Setup}].push_back(static_cast<double>(r.setup_ns));
  }
  out << "tuple,backend,algo,interval,whisker_low_ns,q1_ns,median_ns,q3_ns,whisker_high_ns,outliers\n";
  const auto old_precision = out.precision(15);
  for (const auto& row : rows) {
    const auto& values = groups.at({row.tuple, row.backend, row.algo, row.interval});
    const double iqr = row.stats.q3 - row.stats.q1;
    const double lo_fence = row.stats.q1 - 1.5 * iqr;
    const double hi_fence = row.stats.q3 + 1.5 * iqr;
    double lo = row.stats.q1, hi = row.stats.q3;
    std::size_t outliers = 0;
    for (double v : values) {
      if (v < lo_fence || v > hi_fence) {
        ++outliers;
        continue;
      }
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    out << row.tuple.label() << ',' << row.backend << ',' << to_string(row.algo) << ',' << to_string(row.interval)
        << ',' << lo << ',' << row.stats.q1 << ',' << row.stats.median << ',' << row.stats.q3 << ',' << hi << ','
        << outliers << '\n';
  }
  out.precision(old_precision);
}

/// Writes raw.csv, summary.csv and boxplot.csv into `dir`. The summaries
/// cover Completed records only and are empty when none completed.
inline void write_reports(const std::filesystem::path& dir, std::span<const TimingRecord> records) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream raw(dir / "raw.csv");
    write_raw_csv(raw, records);
  }
  const auto rows = summarize(records);
  std::ofstream summary(dir / "summary.csv");
  write_summary_csv(summary, rows);
  std::ofstream box(dir / "boxplot.csv");
  write_boxplot_csv(box, records, rows);
}

}  // namespace oclmine::bench
