#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oclmine/oclmine.hpp"

namespace {

using namespace oclmine;

struct BenchArgs {
  std::string features = "1,2,4";
  std::string clusters = "2,4,6,8";
  std::string sizes = "128..2048";
  std::size_t passes = 70;
  std::vector<std::string> backends{"single", "multi"};
  std::size_t workers = default_worker_count();
  std::uint64_t seed = 20211;
  std::string opencl_lib;
  std::string kernel_dir;
  std::string out = "results";
  bool allow_cpu_device = false;
  std::optional<long> cancel_after_ms;
  bool quiet = false;
};

struct GenerateArgs {
  std::size_t features = 2;
  std::string sizes = "128,128";
  std::uint64_t seed = 1;
  std::string out;
};

struct ClusterArgs {
  std::string algo = "dbscan";
  std::string backend = "single";
  std::size_t features = 2;
  std::size_t clusters = 2;
  std::size_t size = 128;
  std::uint64_t seed = 1;
  std::size_t workers = default_worker_count();
  std::optional<std::size_t> k;
  std::optional<float> eps;
  std::optional<std::size_t> min_pts;
  std::string opencl_lib;
  std::string kernel_dir;
  bool allow_cpu_device = false;
};

gpu::KernelSourceBundle load_kernels(const std::string& dir) {
  return gpu::KernelSourceBundle::from_directory(dir.empty() ? gpu::KernelSourceBundle::default_directory() : std::filesystem::path(dir));
}

// Loads the OpenCL library for a GPU run. A failure is reported but not fatal:
// GPU runs then fail with DeviceUnavailable and are recorded as errors.
void load_opencl(const std::string& path) {
  auto& loader = ocl::global_loader();
  const auto status = loader.load_default(path);
  if (status != ocl::LoadStatus::Ok) {
    std::cerr << "warning: OpenCL library not loaded (" << ocl::to_string(status) << "): " << loader.last_error()
              << '\n';
  }
}

int run_bench(const BenchArgs& a) {
  bench::GridSpec grid;
  grid.features = bench::parse_axis(a.features);
  grid.clusters = bench::parse_axis(a.clusters);
  grid.sizes = bench::parse_axis(a.sizes);
  grid.passes = a.passes;
  grid.master_seed = a.seed;
  grid.validate();

  std::vector<std::unique_ptr<bench::Backend>> owned;
  for (const auto& name : a.backends) {
    if (name == "single") {
      owned.push_back(std::make_unique<bench::SingleBackend>());
    } else if (name == "multi") {
      owned.push_back(std::make_unique<bench::MultiBackend>(a.workers));
    } else if (name == "gpu") {
      load_opencl(a.opencl_lib);
      owned.push_back(std::make_unique<bench::GpuBackend>(ocl::global_loader(), load_kernels(a.kernel_dir),
                                                          gpu::GpuOptions{a.allow_cpu_device}));
    }
  }
  std::vector<bench::Backend*> backends;
  for (auto& b : owned) backends.push_back(b.get());

  const std::size_t tuples = grid.tuples().size();
  const std::size_t per_pass = tuples * backends.size() * 2;
  std::size_t seen = 0;
  bench::RunOptions options;
  if (a.cancel_after_ms) options.cancel_after = std::chrono::milliseconds(*a.cancel_after_ms);
  options.on_record = [&](const bench::TimingRecord& r) {
    if (r.status == bench::RunStatus::Error && !a.quiet) {
      std::cerr << r.tuple.label() << " pass " << r.pass << ' ' << r.backend << '/' << bench::to_string(r.algo)
                << ": " << r.message << '\n';
    }
    if (++seen % per_pass == 0 && !a.quiet) {
      std::cerr << "pass " << seen / per_pass << '/' << grid.passes << " done\n";
    }
  };

  const auto records = bench::run_grid(grid, backends, options);
  std::size_t completed = 0, aborted = 0, errors = 0, mismatches = 0;
  for (const auto& r : records) {
    completed += r.status == bench::RunStatus::Completed ? 1 : 0;
    aborted += r.status == bench::RunStatus::Aborted ? 1 : 0;
    errors += r.status == bench::RunStatus::Error ? 1 : 0;
    mismatches += r.verify == bench::Verify::Mismatch ? 1 : 0;
  }
  if (completed > 0) {
    bench::write_reports(a.out, records);
  } else {
    std::filesystem::create_directories(a.out);
    std::ofstream raw(std::filesystem::path(a.out) / "raw.csv");
    bench::write_raw_csv(raw, records);
  }
  std::cout << records.size() << " records (" << completed << " completed, " << aborted << " aborted, " << errors
            << " errors, " << mismatches << " verify mismatches) written to " << a.out << '\n';
  return mismatches == 0 ? 0 : 1;
}

int run_generate(const GenerateArgs& a) {
  const DatasetSpec spec{a.features, bench::parse_axis(a.sizes), a.seed};
  const auto data = generate(spec);
  if (a.out.empty() || a.out == "-") {
    write_dataset_csv(std::cout, data.dataset, data.truth);
  } else {
    std::ofstream out(a.out);
    if (!out) throw ValidationError("cannot write " + a.out);
    write_dataset_csv(out, data.dataset, data.truth);
  }
  return 0;
}

int run_cluster(const ClusterArgs& a) {
  const DatasetSpec spec{a.features, std::vector<std::size_t>(a.clusters, a.size), a.seed};
  const Dataset ds = generate(spec).dataset;

  DbscanParams dp = derive_dbscan_params(a.features);
  if (a.eps) dp.eps = *a.eps;
  if (a.min_pts) dp.min_pts = *a.min_pts;
  KmeansParams kp;
  kp.k = a.k.value_or(a.clusters);
  const std::uint64_t kmeans_seed = derive_seed(a.seed, 1);

  std::unique_ptr<bench::Backend> backend;
  if (a.backend == "single") {
    backend = std::make_unique<bench::SingleBackend>();
  } else if (a.backend == "multi") {
    backend = std::make_unique<bench::MultiBackend>(a.workers);
  } else {
    load_opencl(a.opencl_lib);
    backend = std::make_unique<bench::GpuBackend>(ocl::global_loader(), load_kernels(a.kernel_dir),
                                                  gpu::GpuOptions{a.allow_cpu_device});
  }

  CancellationToken token;
  std::vector<Label> labels;
  RunTiming timing;
  if (a.algo == "dbscan") {
    auto r = backend->dbscan(ds, dp, token);
    labels = std::move(r.value);
    timing = r.timing;
  } else {
    auto r = backend->kmeans(ds, kp, kmeans_seed, token);
    labels = std::move(r.value.labels);
    timing = r.timing;
  }
  std::cout << "point_index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) std::cout << i << ',' << labels[i] << '\n';
  std::cerr << a.algo << '/' << a.backend << ": wall " << timing.wall_ns << " ns, setup " << timing.overhead_ns()
            << " ns\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clustering benchmark: DBSCAN and Kmeans on single-threaded, multithreaded and OpenCL backends"};
  app.require_subcommand(1);

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Sweep the experiment grid and write raw.csv, summary.csv, boxplot.csv");
  bench->add_option("--features", bench_args.features, "Feature counts, e.g. 1,2,4")->capture_default_str();
  bench->add_option("--clusters", bench_args.clusters, "Cluster counts, e.g. 2,4,6,8")->capture_default_str();
  bench->add_option("--sizes", bench_args.sizes, "Points per cluster; a..b doubles from a to b")
      ->capture_default_str();
  bench->add_option("--passes", bench_args.passes, "Passes per tuple")->capture_default_str()->check(
      CLI::PositiveNumber);
  bench->add_option("--backends", bench_args.backends, "Backends to run")
      ->delimiter(',')
      ->check(CLI::IsMember({"single", "multi", "gpu"}))
      ->capture_default_str();
  bench->add_option("--workers", bench_args.workers, "Worker threads for the multi backend")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_args.seed, "Master seed")->capture_default_str();
  bench->add_option("--opencl-lib", bench_args.opencl_lib, "OpenCL library path (default: $OPENCL_LIB_PATH, then "
                                                           "conventional locations)");
  bench->add_option("--kernel-dir", bench_args.kernel_dir, "Directory holding the .cl kernel sources");
  bench->add_option("--out", bench_args.out, "Output directory")->capture_default_str();
  bench->add_flag("--allow-cpu-device", bench_args.allow_cpu_device, "Accept a CPU OpenCL device");
  bench->add_option("--cancel-after", bench_args.cancel_after_ms, "Cancel once, this many ms into the sweep")
      ->check(CLI::NonNegativeNumber);
  bench->add_flag("--quiet", bench_args.quiet, "No progress output");

  GenerateArgs gen_args;
  auto* gen = app.add_subcommand("generate", "Write one synthetic dataset as CSV");
  gen->add_option("--features", gen_args.features, "Feature count")->capture_default_str()->check(
      CLI::Range(std::size_t{1}, kMaxFeatures));
  gen->add_option("--sizes", gen_args.sizes, "Points per cluster, one entry per cluster")->capture_default_str();
  gen->add_option("--seed", gen_args.seed, "Seed")->capture_default_str();
  gen->add_option("--out", gen_args.out, "Output file (default: stdout)");

  ClusterArgs cl_args;
  auto* cluster = app.add_subcommand("cluster", "Cluster one synthetic dataset and print point_index,label");
  cluster->add_option("--algo", cl_args.algo, "dbscan or kmeans")
      ->check(CLI::IsMember({"dbscan", "kmeans"}))
      ->capture_default_str();
  cluster->add_option("--backend", cl_args.backend, "single, multi or gpu")
      ->check(CLI::IsMember({"single", "multi", "gpu"}))
      ->capture_default_str();
  cluster->add_option("--features", cl_args.features, "Feature count")->capture_default_str()->check(
      CLI::Range(std::size_t{1}, kMaxFeatures));
  cluster->add_option("--clusters", cl_args.clusters, "Generated clusters")->capture_default_str()->check(
      CLI::PositiveNumber);
  cluster->add_option("--size", cl_args.size, "Points per cluster")->capture_default_str()->check(
      CLI::PositiveNumber);
  cluster->add_option("--seed", cl_args.seed, "Seed")->capture_default_str();
  cluster->add_option("--workers", cl_args.workers, "Worker threads for the multi backend")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cluster->add_option("--k", cl_args.k, "Kmeans k (default: --clusters)");
  cluster->add_option("--eps", cl_args.eps, "DBSCAN radius (default: sqrt(features))");
  cluster->add_option("--min-pts", cl_args.min_pts, "DBSCAN min_pts (default: 10 * features)");
  cluster->add_option("--opencl-lib", cl_args.opencl_lib, "OpenCL library path");
  cluster->add_option("--kernel-dir", cl_args.kernel_dir, "Directory holding the .cl kernel sources");
  cluster->add_flag("--allow-cpu-device", cl_args.allow_cpu_device, "Accept a CPU OpenCL device");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bench) return run_bench(bench_args);
    if (*gen) return run_generate(gen_args);
    if (*cluster) return run_cluster(cl_args);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
