#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "oclmine/concur.hpp"
#include "oclmine/dataset.hpp"
#include "oclmine/dbscan.hpp"
#include "oclmine/errors.hpp"
#include "oclmine/kmeans.hpp"
#include "oclmine/oclloader.hpp"
#include "oclmine/point_state.hpp"
#include "oclmine/timing.hpp"

namespace oclmine::gpu {

using namespace oclmine::cl;
using ocl::ApiEntry;
using ocl::Loader;

// A native call failed; `code` is the driver's status, unmodified.
class GpuError : public std::runtime_error {
 public:
  GpuError(cl_int code, const std::string& what)
      : std::runtime_error(what + " failed with OpenCL status " + std::to_string(code)), code_(code) {}
  cl_int code() const { return code_; }

 private:
  cl_int code_;
};

class DeviceUnavailable : public GpuError {
 public:
  using GpuError::GpuError;
};

class CompileError : public GpuError {
 public:
  CompileError(cl_int code, std::string program, std::string log)
      : GpuError(code, "building " + program), program_(std::move(program)), log_(std::move(log)) {}
  const std::string& program() const { return program_; }
  const std::string& log() const { return log_; }

 private:
  std::string program_;
  std::string log_;
};

class UseAfterTeardown : public std::logic_error {
 public:
  UseAfterTeardown() : std::logic_error("GPU context used after teardown") {}
};

inline constexpr const char* kKmeansKernel = "kmeans_assign";
inline constexpr const char* kDbscanMainKernel = "dbscan_reach_main";
inline constexpr const char* kDbscanExpandKernel = "dbscan_reach_expand";

/// Kernel sources compiled at setup. Empty members are skipped, so a Kmeans
/// run only pays for one program and a DBSCAN run for two.
struct KernelSourceBundle {
  std::string kmeans_assign;
  std::string dbscan_main;
  std::string dbscan_expand;
  // Strict IEEE single precision: no fast-math, no contraction (the kernels
  // also disable FP_CONTRACT), so device comparisons match the host.
  std::string build_options = "-cl-std=CL1.1";

  enum class Which { Kmeans, Dbscan, All };

  static std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ValidationError("cannot read kernel source " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static KernelSourceBundle from_directory(const std::filesystem::path& dir, Which which = Which::All) {
    KernelSourceBundle b;
    if (which != Which::Dbscan) b.kmeans_assign = read_file(dir / "kmeans_assign.cl");
    if (which != Which::Kmeans) {
      b.dbscan_main = read_file(dir / "dbscan_main.cl");
      b.dbscan_expand = read_file(dir / "dbscan_expand.cl");
    }
    return b;
  }

  static std::filesystem::path default_directory() {
    if (const char* env = std::getenv("OCLMINE_KERNEL_DIR"); env != nullptr && *env != '\0') return env;
#ifdef OCLMINE_KERNEL_DIR
    return OCLMINE_KERNEL_DIR;
#else
    return "kernels";
#endif
  }
};

struct GpuOptions {
  // Accept a CPU OpenCL device when no GPU is present (software runtimes on CI).
  bool allow_cpu_device = false;
};

namespace detail {

inline void check(cl_int code, const char* what) {
  if (code != CL_SUCCESS) throw GpuError(code, what);
}

// Handles in creation order; released back to front.
class ReleaseStack {
 public:
  enum class Kind { Context, Queue, Program, Kernel, Mem };

  void push(Kind kind, void* handle) { items_.push_back({kind, handle}); }
  bool empty() const { return items_.empty(); }

  // Best effort: every release is attempted; failures are collected.
  std::vector<std::string> release_all(Loader& loader) {
    std::vector<std::string> failures;
    while (!items_.empty()) {
      auto [kind, h] = items_.back();
      items_.pop_back();
      cl_int rc = CL_SUCCESS;
      switch (kind) {
        case Kind::Kernel: rc = loader.call<ApiEntry::clReleaseKernel>(static_cast<cl_kernel>(h)); break;
        case Kind::Program: rc = loader.call<ApiEntry::clReleaseProgram>(static_cast<cl_program>(h)); break;
        case Kind::Mem: rc = loader.call<ApiEntry::clReleaseMemObject>(static_cast<cl_mem>(h)); break;
        case Kind::Queue: rc = loader.call<ApiEntry::clReleaseCommandQueue>(static_cast<cl_command_queue>(h)); break;
        case Kind::Context: rc = loader.call<ApiEntry::clReleaseContext>(static_cast<cl_context>(h)); break;
      }
      if (rc != CL_SUCCESS) failures.push_back("release failed with status " + std::to_string(rc));
    }
    return failures;
  }

 private:
  struct Item {
    Kind kind;
    void* handle;
  };
  std::vector<Item> items_;
};

}  // namespace detail

/// Device, context, queue and compiled kernels for one run. Obtained from
/// gpu_setup(), released by gpu_teardown(). Not shareable between threads.
class GpuContext {
 public:
  GpuContext(const GpuContext&) = delete;
  GpuContext& operator=(const GpuContext&) = delete;
  GpuContext(GpuContext&&) = default;
  GpuContext& operator=(GpuContext&&) = default;

  ~GpuContext() {
    if (state_ && !state_->torn_down) state_->objects.release_all(*state_->loader);
  }

  bool valid() const { return state_ && !state_->torn_down; }
  std::int64_t setup_ns() const { return state_->setup_ns; }
  const std::string& device_name() const { return state_->device_name; }
  cl_device_type device_type() const { return state_->device_type; }
  bool has_kmeans() const { return state_->kmeans != nullptr; }
  bool has_dbscan() const { return state_->dbscan_main != nullptr && state_->dbscan_expand != nullptr; }

  // Non-fatal release failures seen so far.
  const std::vector<std::string>& release_log() const { return state_->release_log; }

 private:
  struct State {
    Loader* loader = nullptr;
    cl_platform_id platform = nullptr;
    cl_device_id device = nullptr;
    cl_device_type device_type = 0;
    std::string device_name;
    cl_context context = nullptr;
    cl_command_queue queue = nullptr;
    cl_kernel kmeans = nullptr;
    cl_kernel dbscan_main = nullptr;
    cl_kernel dbscan_expand = nullptr;
    detail::ReleaseStack objects;
    std::vector<std::string> release_log;
    std::int64_t setup_ns = 0;
    bool torn_down = false;
  };

  GpuContext() : state_(std::make_unique<State>()) {}

  State& live() const {
    if (!state_ || state_->torn_down) throw UseAfterTeardown();
    return *state_;
  }

  std::unique_ptr<State> state_;

  friend GpuContext gpu_setup(Loader&, const KernelSourceBundle&, const GpuOptions&);
  friend SetupTiming gpu_teardown(GpuContext&);
  friend class DeviceRun;
};

namespace detail {

inline std::string device_string(Loader& loader, cl_device_id dev, cl_device_info what) {
  std::size_t size = 0;
  if (loader.call<ApiEntry::clGetDeviceInfo>(dev, what, std::size_t{0}, nullptr, &size) != CL_SUCCESS || size == 0) {
    return {};
  }
  std::string s(size, '\0');
  if (loader.call<ApiEntry::clGetDeviceInfo>(dev, what, size, s.data(), nullptr) != CL_SUCCESS) return {};
  while (!s.empty() && s.back() == '\0') s.pop_back();
  return s;
}

inline std::string build_log(Loader& loader, cl_program program, cl_device_id dev) {
  std::size_t size = 0;
  loader.call<ApiEntry::clGetProgramBuildInfo>(program, dev, CL_PROGRAM_BUILD_LOG, std::size_t{0}, nullptr, &size);
  if (size == 0) return {};
  std::string log(size, '\0');
  loader.call<ApiEntry::clGetProgramBuildInfo>(program, dev, CL_PROGRAM_BUILD_LOG, size, log.data(), nullptr);
  while (!log.empty() && log.back() == '\0') log.pop_back();
  return log;
}

}  // namespace detail

/// Picks a device (GPU first; CPU only if allowed), creates context and
/// queue, and compiles every non-empty source in `sources` at runtime.
///
/// Throws DeviceUnavailable when no usable platform/device exists (including
/// when `loader` has nothing loaded), CompileError with the driver's build log
/// when a program does not build.
inline GpuContext gpu_setup(Loader& loader, const KernelSourceBundle& sources, const GpuOptions& options = {}) {
  const auto start = Clock::now();
  GpuContext ctx;
  auto& st = *ctx.state_;
  st.loader = &loader;

  try {
    cl_uint num_platforms = 0;
    cl_int rc = loader.call<ApiEntry::clGetPlatformIDs>(cl_uint{0}, nullptr, &num_platforms);
    if (rc != CL_SUCCESS) throw DeviceUnavailable(rc, "clGetPlatformIDs");
    if (num_platforms == 0) throw DeviceUnavailable(CL_DEVICE_NOT_FOUND, "clGetPlatformIDs");
    std::vector<cl_platform_id> platforms(num_platforms);
    detail::check(loader.call<ApiEntry::clGetPlatformIDs>(num_platforms, platforms.data(), nullptr),
                  "clGetPlatformIDs");

    std::vector<cl_device_type> wanted{CL_DEVICE_TYPE_GPU};
    if (options.allow_cpu_device) wanted.push_back(CL_DEVICE_TYPE_CPU);
    for (cl_device_type type : wanted) {
      for (cl_platform_id p : platforms) {
        cl_device_id dev = nullptr;
        cl_uint count = 0;
        if (loader.call<ApiEntry::clGetDeviceIDs>(p, type, cl_uint{1}, &dev, &count) == CL_SUCCESS && count > 0) {
          st.platform = p;
          st.device = dev;
          st.device_type = type;
          break;
        }
      }
      if (st.device != nullptr) break;
    }
    if (st.device == nullptr) throw DeviceUnavailable(CL_DEVICE_NOT_FOUND, "clGetDeviceIDs");
    st.device_name = detail::device_string(loader, st.device, CL_DEVICE_NAME);

    const cl_context_properties props[] = {CL_CONTEXT_PLATFORM,
                                           reinterpret_cast<cl_context_properties>(st.platform), 0};
    cl_int err = CL_SUCCESS;
    st.context = loader.call<ApiEntry::clCreateContext>(props, cl_uint{1}, &st.device, context_notify_fn{nullptr},
                                                        nullptr, &err);
    detail::check(err, "clCreateContext");
    st.objects.push(detail::ReleaseStack::Kind::Context, st.context);

    st.queue = loader.call<ApiEntry::clCreateCommandQueue>(st.context, st.device, cl_command_queue_properties{0}, &err);
    detail::check(err, "clCreateCommandQueue");
    st.objects.push(detail::ReleaseStack::Kind::Queue, st.queue);

    auto build = [&](const std::string& source, const char* name) -> cl_kernel {
      const char* text = source.c_str();
      const std::size_t len = source.size();
      cl_program program =
          loader.call<ApiEntry::clCreateProgramWithSource>(st.context, cl_uint{1}, &text, &len, &err);
      detail::check(err, "clCreateProgramWithSource");
      st.objects.push(detail::ReleaseStack::Kind::Program, program);
      rc = loader.call<ApiEntry::clBuildProgram>(program, cl_uint{1}, &st.device, sources.build_options.c_str(),
                                                  program_notify_fn{nullptr}, nullptr);
      if (rc != CL_SUCCESS) throw CompileError(rc, name, detail::build_log(loader, program, st.device));
      cl_kernel kernel = loader.call<ApiEntry::clCreateKernel>(program, name, &err);
      detail::check(err, "clCreateKernel");
      st.objects.push(detail::ReleaseStack::Kind::Kernel, kernel);
      return kernel;
    };
    if (!sources.kmeans_assign.empty()) st.kmeans = build(sources.kmeans_assign, kKmeansKernel);
    if (!sources.dbscan_main.empty()) st.dbscan_main = build(sources.dbscan_main, kDbscanMainKernel);
    if (!sources.dbscan_expand.empty()) st.dbscan_expand = build(sources.dbscan_expand, kDbscanExpandKernel);
  } catch (...) {
    st.objects.release_all(loader);
    st.torn_down = true;
    throw;
  }

  st.setup_ns = elapsed_ns(start, Clock::now());
  return ctx;
}

/// Releases kernels, programs, queue and context in reverse creation order.
/// Release failures are recorded in release_log() and do not stop teardown.
/// A second call throws UseAfterTeardown.
inline SetupTiming gpu_teardown(GpuContext& ctx) {
  auto& st = ctx.live();
  const auto start = Clock::now();
  auto failures = st.objects.release_all(*st.loader);
  st.release_log.insert(st.release_log.end(), failures.begin(), failures.end());
  st.torn_down = true;
  return {st.setup_ns, elapsed_ns(start, Clock::now())};
}

/// Buffers for one algorithm run on a GpuContext. Host-backed buffers alias
/// page-aligned host storage that outlives the buffer, and the storage is
/// never resized while the buffer exists.
class DeviceRun {
 public:
  DeviceRun(GpuContext& ctx, const Dataset& ds) : st_(ctx.live()), loader_(*st_.loader), ds_(ds) {}

  DeviceRun(const DeviceRun&) = delete;
  DeviceRun& operator=(const DeviceRun&) = delete;

  ~DeviceRun() { release(); }

  cl_mem create_buffer(cl_mem_flags flags, std::size_t bytes, void* host_ptr) {
    cl_int err = CL_SUCCESS;
    cl_mem m = loader_.call<ApiEntry::clCreateBuffer>(st_.context, flags, bytes, host_ptr, &err);
    detail::check(err, "clCreateBuffer");
    buffers_.push(detail::ReleaseStack::Kind::Mem, m);
    return m;
  }

  // The dataset stays untouched; the read-only flag lets the driver know.
  cl_mem data_buffer() {
    return create_buffer(CL_MEM_READ_ONLY | CL_MEM_USE_HOST_PTR, std::max<std::size_t>(ds_.bytes(), 4),
                         const_cast<float*>(ds_.data()));
  }

  template <class T>
  void set_arg(cl_kernel k, cl_uint index, const T& value) {
    detail::check(loader_.call<ApiEntry::clSetKernelArg>(k, index, sizeof(T), static_cast<const void*>(&value)),
                  "clSetKernelArg");
  }

  void launch(cl_kernel k, std::size_t global) {
    detail::check(loader_.call<ApiEntry::clEnqueueNDRangeKernel>(st_.queue, k, cl_uint{1}, nullptr, &global,
                                                                 nullptr, cl_uint{0}, nullptr, nullptr),
                  "clEnqueueNDRangeKernel");
  }

  void write(cl_mem m, std::size_t bytes, const void* src, bool blocking) {
    detail::check(loader_.call<ApiEntry::clEnqueueWriteBuffer>(st_.queue, m, blocking ? CL_TRUE : CL_FALSE,
                                                               std::size_t{0}, bytes, src, cl_uint{0}, nullptr,
                                                               nullptr),
                  "clEnqueueWriteBuffer");
  }

  void read(cl_mem m, std::size_t bytes, void* dst) {
    detail::check(loader_.call<ApiEntry::clEnqueueReadBuffer>(st_.queue, m, CL_TRUE, std::size_t{0}, bytes, dst,
                                                              cl_uint{0}, nullptr, nullptr),
                  "clEnqueueReadBuffer");
  }

  void* map(cl_mem m, cl_map_flags flags, std::size_t bytes) {
    cl_int err = CL_SUCCESS;
    void* p = loader_.call<ApiEntry::clEnqueueMapBuffer>(st_.queue, m, CL_TRUE, flags, std::size_t{0}, bytes,
                                                         cl_uint{0}, nullptr, nullptr, &err);
    detail::check(err, "clEnqueueMapBuffer");
    return p;
  }

  void unmap(cl_mem m, void* p) {
    detail::check(loader_.call<ApiEntry::clEnqueueUnmapMemObject>(st_.queue, m, p, cl_uint{0}, nullptr, nullptr),
                  "clEnqueueUnmapMemObject");
  }

  void finish() { detail::check(loader_.call<ApiEntry::clFinish>(st_.queue), "clFinish"); }

  // Releases this run's buffers; returns the time it took.
  std::int64_t release() {
    if (buffers_.empty()) return 0;
    const auto start = Clock::now();
    loader_.call<ApiEntry::clFinish>(st_.queue);
    auto failures = buffers_.release_all(loader_);
    st_.release_log.insert(st_.release_log.end(), failures.begin(), failures.end());
    return elapsed_ns(start, Clock::now());
  }

  cl_kernel kmeans_kernel() const {
    if (st_.kmeans == nullptr) throw ValidationError("context was set up without the Kmeans kernel");
    return st_.kmeans;
  }
  cl_kernel dbscan_kernel(SearchPhase phase) const {
    if (st_.dbscan_main == nullptr || st_.dbscan_expand == nullptr) {
      throw ValidationError("context was set up without the DBSCAN kernels");
    }
    return phase == SearchPhase::Main ? st_.dbscan_main : st_.dbscan_expand;
  }

 private:
  GpuContext::State& st_;
  Loader& loader_;
  const Dataset& ds_;
  detail::ReleaseStack buffers_;
};

namespace detail {

// Neighbor searches on the device. The state words live in page-aligned host
// memory aliased by a host-backed buffer. The host touches them only while
// mapped; each query unmaps, launches the phase kernel, reads the neighbor
// counter and maps the words again. The kernel sets its phase bit on every
// point in range and clears it elsewhere, so after a core-point query the
// neighbor list is the set of words carrying that bit.
class DeviceNeighborSource {
 public:
  DeviceNeighborSource(DeviceRun& run, const Dataset& ds, float eps2, std::size_t min_pts)
      : run_(run), n_(ds.size()), min_pts_(min_pts), words_(std::max<std::size_t>(ds.size(), 1)) {
    data_ = run_.data_buffer();
    state_ = run_.create_buffer(CL_MEM_READ_WRITE | CL_MEM_USE_HOST_PTR, words_.size() * sizeof(std::uint16_t),
                                words_.data());
    counter_ = run_.create_buffer(CL_MEM_READ_WRITE, sizeof(cl_uint), nullptr);
    const auto n = static_cast<cl_uint>(ds.size());
    const auto d = static_cast<cl_uint>(ds.features());
    for (SearchPhase phase : {SearchPhase::Main, SearchPhase::Expand}) {
      cl_kernel k = run_.dbscan_kernel(phase);
      run_.set_arg(k, 0, data_);
      run_.set_arg(k, 1, n);
      run_.set_arg(k, 2, d);
      run_.set_arg(k, 4, eps2);
      run_.set_arg(k, 5, state_);
      run_.set_arg(k, 6, counter_);
    }
    map();
  }

  ~DeviceNeighborSource() {
    if (mapped_ != nullptr) {
      try {
        run_.unmap(state_, mapped_);
        run_.finish();
      } catch (...) {
      }
    }
  }

  std::size_t query(SearchPhase phase, std::size_t q, std::vector<std::uint32_t>& out) {
    cl_kernel k = run_.dbscan_kernel(phase);
    run_.unmap(state_, mapped_);
    mapped_ = nullptr;
    static constexpr cl_uint zero = 0;
    run_.write(counter_, sizeof(cl_uint), &zero, false);
    run_.set_arg(k, 3, static_cast<cl_uint>(q));
    run_.launch(k, n_);
    cl_uint count = 0;
    run_.read(counter_, sizeof(cl_uint), &count);
    map();

    out.clear();
    if (count >= min_pts_) {
      const std::uint16_t bit = phase == SearchPhase::Main ? PointState::kReachMain : PointState::kReachExpand;
      const auto st = states();
      for (std::size_t j = 0; j < n_; ++j) {
        if (st[j].has(bit)) out.push_back(static_cast<std::uint32_t>(j));
      }
    }
    return count;
  }

  std::span<PointState> states() { return {static_cast<PointState*>(mapped_), n_}; }

 private:
  void map() { mapped_ = run_.map(state_, CL_MAP_READ | CL_MAP_WRITE, words_.size() * sizeof(std::uint16_t)); }

  DeviceRun& run_;
  std::size_t n_;
  std::size_t min_pts_;
  AlignedVector<std::uint16_t> words_;
  cl_mem data_ = nullptr;
  cl_mem state_ = nullptr;
  cl_mem counter_ = nullptr;
  void* mapped_ = nullptr;
};

}  // namespace detail

/// Lloyd Kmeans with the assignment step on the device: per iteration the
/// host uploads the centers, one launch labels every point, and the host reads
/// the labels back to recompute centers. The token is checked between
/// launches.
///
/// The timing's setup/teardown cover buffer creation and release; the
/// context's own setup is reported by gpu_setup/gpu_teardown.
inline Timed<KmeansResult> kmeans_gpu(GpuContext& ctx, const Dataset& ds, const KmeansParams& params,
                                      std::uint64_t seed, const CancellationToken* token = nullptr) {
  params.validate(ds.size());
  const auto start = Clock::now();
  DeviceRun run(ctx, ds);
  cl_kernel kernel = run.kmeans_kernel();
  const std::size_t center_bytes = params.k * ds.features() * sizeof(float);
  AlignedVector<std::uint16_t> words(ds.size());
  cl_mem data = run.data_buffer();
  cl_mem centers_buf = run.create_buffer(CL_MEM_READ_ONLY, center_bytes, nullptr);
  cl_mem labels_buf =
      run.create_buffer(CL_MEM_READ_WRITE | CL_MEM_USE_HOST_PTR, words.size() * sizeof(std::uint16_t), words.data());
  run.set_arg(kernel, 0, data);
  run.set_arg(kernel, 1, centers_buf);
  run.set_arg(kernel, 2, static_cast<cl_uint>(ds.size()));
  run.set_arg(kernel, 3, static_cast<cl_uint>(ds.features()));
  run.set_arg(kernel, 4, static_cast<cl_uint>(params.k));
  run.set_arg(kernel, 5, labels_buf);
  const auto ready = Clock::now();

  KmeansResult result = kmeans_lloyd(
      ds, params, seed, token, [&](std::span<const float> centers, std::span<Label> labels, CenterSums& sums) {
        run.write(centers_buf, center_bytes, centers.data(), false);
        run.launch(kernel, ds.size());
        auto* mapped = static_cast<const std::uint16_t*>(
            run.map(labels_buf, CL_MAP_READ, words.size() * sizeof(std::uint16_t)));
        const std::size_t d = ds.features();
        for (std::size_t i = 0; i < ds.size(); ++i) {
          labels[i] = mapped[i];
          sums.add(labels[i], ds.data() + i * d);
        }
        run.unmap(labels_buf, const_cast<std::uint16_t*>(mapped));
      });
  run.finish();
  const auto done = Clock::now();
  run.release();
  const auto end = Clock::now();
  return {std::move(result), RunTiming::from_marks(start, ready, done, end)};
}

/// DBSCAN with neighbor searches on the device: the host runs the same
/// traversal as dbscan_single and issues one launch per visited point, using
/// the main-loop kernel for outer-loop points and the expansion kernel while
/// growing a cluster. Labels are identical to dbscan_single.
inline Timed<std::vector<Label>> dbscan_gpu(GpuContext& ctx, const Dataset& ds, const DbscanParams& params,
                                            const CancellationToken* token = nullptr) {
  params.validate();
  const auto start = Clock::now();
  if (ds.empty()) {
    if (!ctx.valid()) throw UseAfterTeardown();
    return {{}, RunTiming::from_marks(start, start, start, start)};
  }
  DeviceRun run(ctx, ds);
  std::vector<Label> labels;
  Clock::time_point ready, done;
  {
    detail::DeviceNeighborSource source(run, ds, params.eps_squared(), params.min_pts);
    ready = Clock::now();
    labels = dbscan_traverse(source, ds.size(), params.min_pts, token);
    done = Clock::now();
  }
  run.release();
  const auto end = Clock::now();
  return {std::move(labels), RunTiming::from_marks(start, ready, done, end)};
}

}  // namespace oclmine::gpu
