// One PASS/FAIL line per acceptance criterion; exits nonzero on any failure.
// Device checks run only when OCLMINE_OPENCL_LIB names a driver and are
// informational.
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oclmine/oclmine.hpp"
#include "oracle/dbscan_oracle.hpp"
#include "support.hpp"

using namespace oclmine;
using namespace oclmine::cl;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::vector<float> values_of(const Dataset& ds) { return {ds.values().begin(), ds.values().end()}; }

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

Outcome dbscan_oracle() {
  const auto start = Clock::now();
  std::size_t failures = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t d = std::size_t{1} << (seed % 3);
    const std::size_t n = 1 + (seed * 131 + 17) % 512;
    const Dataset ds = seed % 2 == 0 ? support::uniform_dataset(n, d, 1000 + seed, 8.0)
                                     : generate(DatasetSpec{d, {n / 2, n - n / 2}, 1000 + seed}).dataset;
    const float eps = 0.25f + 0.05f * static_cast<float>(seed % 13);
    const std::size_t min_pts = 1 + seed % 10;
    if (dbscan_single(ds, {eps, min_pts}) != oracle::dbscan(values_of(ds), n, d, eps, min_pts)) ++failures;
  }
  const double secs = seconds_since(start);
  std::ostringstream out;
  out << 200 - failures << "/200 instances equal, " << secs << " s";
  return {failures == 0 && secs < 60.0, out.str()};
}

Outcome dbscan_parity() {
  bench::SingleBackend single;
  bench::MultiBackend two(2), seven(7);
  bench::Backend* backends[] = {&single, &two, &seven};
  bench::GridSpec grid;
  grid.passes = 1;
  const auto records = bench::run_grid(grid, backends);
  std::size_t checked = 0, bad = 0;
  for (const auto& r : records) {
    if (r.algo != bench::Algorithm::Dbscan) continue;
    if (r.status != bench::RunStatus::Completed || !r.verify_ok()) ++bad;
    ++checked;
  }
  std::ostringstream out;
  out << checked - bad << "/" << checked << " records verified (workers 2 and 7 vs single)";
  return {bad == 0 && checked == 3 * grid.tuples().size(), out.str()};
}

// Independent of the library's helper: double accumulation over the raw data.
double wcss(const Dataset& ds, std::span<const Label> labels, std::span<const float> centers) {
  const std::size_t d = ds.features();
  double total = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t f = 0; f < d; ++f) {
      const double diff = static_cast<double>(ds.values()[i * d + f]) - centers[labels[i] * d + f];
      total += diff * diff;
    }
  }
  return total;
}

Outcome kmeans_properties() {
  std::size_t increases = 0, bad_stop = 0, parallel_diff = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t d = 1 + seed % 4;
    const std::size_t clusters = 2 + seed % 7;
    const auto ds = generate(DatasetSpec{d, std::vector<std::size_t>(clusters, 40 + seed % 90), 500 + seed}).dataset;
    KmeansParams p;
    p.k = 1 + (seed * 7) % 9;
    if (seed % 10 == 9) p.max_iter = 2;
    std::vector<double> trace;
    double last_move = 0.0;
    p.observer = [&](const KmeansIteration& it) {
      trace.push_back(wcss(ds, it.labels, it.centers));
      last_move = it.displacement;
    };
    const auto single = kmeans_single(ds, p, seed);
    for (std::size_t i = 1; i < trace.size(); ++i) {
      if (trace[i] > trace[i - 1]) ++increases;
    }
    const bool by_tol = single.converged && last_move < p.tol;
    const bool by_cap = !single.converged && single.iterations == p.max_iter;
    if (!(by_tol || by_cap) || trace.size() != single.iterations) ++bad_stop;

    p.observer = nullptr;
    const auto multi = kmeans_parallel(ds, p, seed, nullptr, WorkerPoolConfig{1 + seed % 5}).value;
    if (multi.labels != single.labels) ++parallel_diff;
  }
  std::ostringstream out;
  out << increases << " WCSS increases, " << bad_stop << " bad terminations, " << parallel_diff
      << " parallel label mismatches over 100 instances";
  return {increases == 0 && bad_stop == 0 && parallel_diff == 0, out.str()};
}

template <class Pred>
bool wait_until(Pred pred) {
  const auto deadline = Clock::now() + std::chrono::seconds(5);
  while (!pred()) {
    if (Clock::now() > deadline) return false;
    std::this_thread::yield();
  }
  return true;
}

Outcome rwlock_suite() {
  int preference_violations = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    RwLockWP lock;
    std::atomic<int> seq{0}, writer_at{-1}, reader_at{-1};
    lock.lock_shared();
    std::thread writer([&] {
      lock.lock();
      writer_at = seq.fetch_add(1);
      lock.unlock();
    });
    if (!wait_until([&] { return lock.writers_waiting() == 1; })) ++preference_violations;
    std::thread late_reader([&] {
      lock.lock_shared();
      reader_at = seq.fetch_add(1);
      lock.unlock_shared();
    });
    std::this_thread::yield();
    if (reader_at.load() != -1) ++preference_violations;
    lock.unlock_shared();
    writer.join();
    late_reader.join();
    if (!(writer_at.load() < reader_at.load())) ++preference_violations;
  }

  bool depth_ok = true;
  {
    RwLockWP lock;
    for (int i = 0; i < 64; ++i) lock.lock_shared();
    depth_ok = lock.read_depth_of_caller() == 64;
    for (int i = 0; i < 64; ++i) lock.unlock_shared();
    depth_ok = depth_ok && lock.try_lock();
    if (depth_ok) lock.unlock();
  }

  RwLockWP lock;
  long a = 0, b = 0;
  std::atomic<long> torn{0}, ops{0};
  std::vector<std::thread> threads;
  for (unsigned t = 0; t < 6; ++t) {
    threads.emplace_back([&, t] {
      std::mt19937 rng(t * 104729u + 3u);
      for (int i = 0; i < 20000; ++i) {
        if (rng() % 10 < 3) {
          auto g = acquire_write(lock);
          ++a;
          if (rng() % 4 == 0) std::this_thread::yield();
          ++b;
        } else {
          auto g = acquire_read(lock);
          if (rng() % 8 == 0) std::this_thread::yield();
          if (a != b) ++torn;
        }
        ++ops;
      }
    });
  }
  for (auto& t : threads) t.join();

  std::ostringstream out;
  out << preference_violations << " preference violations in 1000 runs, depth 64 " << (depth_ok ? "ok" : "failed")
      << ", " << torn.load() << " torn reads in " << ops.load() << " operations";
  return {preference_violations == 0 && depth_ok && torn == 0 && ops >= 100000 && a == b, out.str()};
}

Outcome loader_conformance() {
  using ocl::ApiEntry;
  auto& stub = support::Stub::get();
  stub.reset();
  std::vector<std::string> failures;
  auto expect = [&](bool ok, const char* what) {
    if (!ok) failures.emplace_back(what);
  };

  {
    ocl::Loader l;
    cl_uint count = 0;
    expect(l.call<ApiEntry::clGetPlatformIDs>(0, nullptr, &count) == -1001, "call before load returns -1001");
    expect(l.load(support::kStubPath) == ocl::LoadStatus::Ok, "load");
    expect(l.resolved_count() == 0, "nothing resolved after load");
    expect(l.call<ApiEntry::clGetPlatformIDs>(0, nullptr, &count) == CL_SUCCESS && count == 1, "forwarded call");
    expect(l.resolved_count() == 1, "one symbol resolved after first call");
    l.unload();
    expect(l.call<ApiEntry::clGetPlatformIDs>(0, nullptr, &count) == -1001, "call after unload returns -1001");
    expect(l.load(support::kStubPath) == ocl::LoadStatus::Ok && l.resolved_count() == 0, "reload");
    expect(l.call<ApiEntry::clGetPlatformIDs>(0, nullptr, &count) == CL_SUCCESS, "call after reload");
  }

  static ocl::Loader* probe_loader = nullptr;
  static std::atomic<long> forwarded_while_unloaded{0};
  stub.reset();
  ocl::Loader l;
  probe_loader = &l;
  stub.set_probe(
      [](void*) {
        if (!probe_loader->is_loaded()) ++forwarded_while_unloaded;
      },
      nullptr);
  std::atomic<bool> stop{false};
  std::atomic<long> ok{0}, unexpected{0}, in_driver_after_unload{0};
  std::vector<std::thread> dispatchers;
  for (int t = 0; t < 6; ++t) {
    dispatchers.emplace_back([&] {
      while (!stop) {
        cl_uint count = 0;
        const cl_int rc = l.call<ApiEntry::clGetPlatformIDs>(0, nullptr, &count);
        if (rc == CL_SUCCESS && count == 1) {
          ++ok;
        } else if (rc != ocl::kNotLoaded) {
          ++unexpected;
        }
      }
    });
  }
  bool cycles_ok = true;
  for (int cycle = 0; cycle < 300; ++cycle) {
    cycles_ok = cycles_ok && l.load(support::kStubPath) == ocl::LoadStatus::Ok;
    std::this_thread::yield();
    l.unload();
    if (stub.in_flight() != 0) ++in_driver_after_unload;
  }
  stop = true;
  for (auto& t : dispatchers) t.join();
  stub.set_probe(nullptr, nullptr);
  probe_loader = nullptr;
  expect(cycles_ok, "300 load/unload cycles");
  expect(unexpected == 0, "no unexpected status during storm");
  expect(forwarded_while_unloaded == 0, "no forward while unloaded");
  expect(in_driver_after_unload == 0, "no call inside the driver after unload");
  expect(static_cast<unsigned long>(ok.load()) == stub.call_count("clGetPlatformIDs"), "stub saw every success");

  std::ostringstream out;
  if (failures.empty()) {
    out << "lazy resolution, reload and " << ok.load() << " storm dispatches consistent with the stub";
  } else {
    for (const auto& f : failures) out << "failed: " << f << "; ";
  }
  return {failures.empty(), out.str()};
}

Outcome harness_reproducibility() {
  auto run = [](std::size_t& accounting_failures) {
    bench::SingleBackend single;
    bench::MultiBackend multi(3);
    bench::Backend* backends[] = {&single, &multi};
    bench::GridSpec grid;
    grid.sizes = {128, 256};
    grid.passes = 2;
    const auto records = bench::run_grid(grid, backends);
    std::vector<std::string> rows;
    for (const auto& r : records) {
      if (!r.accounting_holds()) ++accounting_failures;
      std::ostringstream line;
      std::vector<bench::TimingRecord> one{r};
      bench::write_raw_csv(line, one);
      std::string text = line.str();
      text = text.substr(text.find('\n') + 1);
      // Drop the two timing columns.
      std::vector<std::string> cells;
      std::istringstream ls(text);
      std::string cell;
      while (std::getline(ls, cell, ',')) cells.push_back(cell);
      cells[4] = cells[5] = "-";
      std::string joined;
      for (const auto& c : cells) joined += c + ",";
      rows.push_back(joined);
    }
    return rows;
  };
  std::size_t accounting_failures = 0;
  const auto first = run(accounting_failures);
  const auto second = run(accounting_failures);
  std::ostringstream out;
  out << first.size() << " rows, " << (first == second ? "identical" : "different") << " modulo timings, "
      << accounting_failures << " accounting failures";
  return {first == second && !first.empty() && accounting_failures == 0, out.str()};
}

// ---------------------------------------------------------------------------
// Device checks

Outcome kernel_parity(ocl::Loader& loader, const gpu::GpuOptions& options) {
  using namespace gpu;
  GpuContext ctx = gpu_setup(loader, KernelSourceBundle::from_directory(KernelSourceBundle::default_directory()),
                             options);
  const auto tuples = bench::GridSpec{}.tuples();
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    const auto plan = bench::plan_pass(20211, tuples[i], 0);
    const auto ds = generate(bench::dataset_spec_for(tuples[i], plan.dataset_seed)).dataset;
    const auto dp = derive_dbscan_params(tuples[i].features);
    if (dbscan_gpu(ctx, ds, dp).value != dbscan_single(ds, dp)) ++mismatches;
    KmeansParams kp;
    kp.k = tuples[i].clusters;
    if (kmeans_gpu(ctx, ds, kp, plan.kmeans_seed).value.labels != kmeans_single(ds, kp, plan.kmeans_seed).labels) {
      ++mismatches;
    }
  }

  std::size_t counter_mismatches = 0;
  for (std::size_t d : {1, 2, 4}) {
    const auto ds = generate(DatasetSpec{d, {128, 128, 128, 128}, 40 + d}).dataset;
    const float eps = derive_dbscan_params(d).eps;
    const auto counts = oracle::neighbor_counts(oracle::adjacency(values_of(ds), ds.size(), d, eps));
    DeviceRun run(ctx, ds);
    gpu::detail::DeviceNeighborSource source(run, ds, eps * eps, 0);
    std::vector<std::uint32_t> out;
    for (std::size_t q = 0; q < ds.size(); ++q) {
      if (source.query(q % 2 == 0 ? SearchPhase::Main : SearchPhase::Expand, q, out) != counts[q]) {
        ++counter_mismatches;
      }
    }
  }

  CancellationToken token;
  token.cancel();
  bool cancel_ok = false;
  try {
    dbscan_gpu(ctx, generate(DatasetSpec{2, {256, 256}, 5}).dataset, derive_dbscan_params(2), &token);
  } catch (const Aborted&) {
    cancel_ok = true;
  }
  gpu_teardown(ctx);

  std::ostringstream out;
  out << mismatches << " label mismatches over 50 tuples, " << counter_mismatches
      << " counter mismatches over 1536 queries, cancel " << (cancel_ok ? "ok" : "ignored");
  return {mismatches == 0 && counter_mismatches == 0 && cancel_ok, out.str()};
}

double log_log_slope(const std::vector<double>& n, const std::vector<double>& t) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    mx += std::log(n[i]);
    my += std::log(t[i]);
  }
  mx /= static_cast<double>(n.size());
  my /= static_cast<double>(n.size());
  double num = 0, den = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    num += (std::log(n[i]) - mx) * (std::log(t[i]) - my);
    den += (std::log(n[i]) - mx) * (std::log(n[i]) - mx);
  }
  return num / den;
}

Outcome scaling_trend(ocl::Loader& loader, const gpu::GpuOptions& options) {
  using namespace gpu;
  GpuContext ctx = gpu_setup(loader, KernelSourceBundle::from_directory(KernelSourceBundle::default_directory()),
                             options);
  std::vector<double> sizes, single_ns, gpu_ns;
  for (std::size_t per_cluster : {1024, 2048, 4096}) {
    const auto ds = generate(DatasetSpec{2, {per_cluster, per_cluster, per_cluster, per_cluster}, 77}).dataset;
    const auto dp = derive_dbscan_params(2);
    const auto s = Clock::now();
    dbscan_single(ds, dp);
    single_ns.push_back(static_cast<double>(elapsed_ns(s, Clock::now())));
    gpu_ns.push_back(static_cast<double>(dbscan_gpu(ctx, ds, dp).timing.wall_ns));
    sizes.push_back(static_cast<double>(ds.size()));
  }
  gpu_teardown(ctx);
  const double s_single = log_log_slope(sizes, single_ns), s_gpu = log_log_slope(sizes, gpu_ns);
  std::ostringstream out;
  out << "log-log slope single " << s_single << ", gpu " << s_gpu << " (n = 4096..16384)";
  return {s_gpu < s_single, out.str()};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](const char* name, const std::function<Outcome()>& check, bool required) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass && required) ++failures;
    std::cout << (o.pass ? "PASS" : required ? "FAIL" : "INFO-FAIL") << "  " << name << ": " << o.detail << std::endl;
  };

  report("dbscan matches brute-force oracle", dbscan_oracle, true);
  report("multi-threaded dbscan matches single on the default grid", dbscan_parity, true);
  report("kmeans Lloyd properties", kmeans_properties, true);
  report("reader-writer lock suite", rwlock_suite, true);
  report("loader conformance against stub driver", loader_conformance, true);
  report("harness reproducibility and accounting", harness_reproducibility, true);

  const char* lib = std::getenv("OCLMINE_OPENCL_LIB");
  if (lib != nullptr && *lib != '\0') {
    ocl::Loader loader;
    gpu::GpuOptions options;
    const char* cpu = std::getenv("OCLMINE_ALLOW_CPU");
    options.allow_cpu_device = cpu != nullptr && std::string(cpu) == "1";
    if (loader.load(lib) == ocl::LoadStatus::Ok) {
      report("kernel parity on device (informational)", [&] { return kernel_parity(loader, options); }, false);
      report("gpu scaling trend (informational)", [&] { return scaling_trend(loader, options); }, false);
    } else {
      std::cout << "SKIP  device checks: cannot load " << lib << std::endl;
    }
  } else {
    std::cout << "SKIP  device checks: OCLMINE_OPENCL_LIB not set" << std::endl;
  }

  std::cout << (failures == 0 ? "all acceptance criteria passed" : "acceptance FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
