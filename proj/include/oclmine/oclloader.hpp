#pragma once

#include <dlfcn.h>

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "oclmine/cl_api.hpp"
#include "oclmine/concur.hpp"

namespace oclmine::ocl {

using namespace oclmine::cl;

/// Returned by every wrapped call while no library is loaded. It is the
/// status a native ICD loader gives when it finds no platform.
inline constexpr cl_int kNotLoaded = CL_PLATFORM_NOT_FOUND_KHR;  // -1001

/// Returned when the loaded library does not export the requested entry point.
inline constexpr cl_int kSymbolMissing = -1100;

enum class ApiEntry : std::size_t {
#define OCLMINE_ENUM_CODE(name, params, args) name,
#define OCLMINE_ENUM_ERR(ret, name, params, args) name,
  OCLMINE_CL_API(OCLMINE_ENUM_CODE, OCLMINE_ENUM_ERR, OCLMINE_ENUM_CODE)
#undef OCLMINE_ENUM_CODE
#undef OCLMINE_ENUM_ERR
};

inline constexpr std::array kApiNames = {
#define OCLMINE_NAME_CODE(name, params, args) #name,
#define OCLMINE_NAME_ERR(ret, name, params, args) #name,
    OCLMINE_CL_API(OCLMINE_NAME_CODE, OCLMINE_NAME_ERR, OCLMINE_NAME_CODE)
#undef OCLMINE_NAME_CODE
#undef OCLMINE_NAME_ERR
};

inline constexpr std::size_t kApiCount = kApiNames.size();

inline constexpr std::string_view api_name(ApiEntry e) { return kApiNames[static_cast<std::size_t>(e)]; }

inline std::optional<ApiEntry> find_api(std::string_view name) {
  for (std::size_t i = 0; i < kApiCount; ++i) {
    if (kApiNames[i] == name) return static_cast<ApiEntry>(i);
  }
  return std::nullopt;
}

// How an entry point reports failure when it cannot be forwarded.
enum class FailureShape { ReturnCode, ErrcodeOut, NullOnly };

template <ApiEntry E>
struct ApiTraits;

#define OCLMINE_TRAITS(shape, ret, name, params)                   \
  template <>                                                      \
  struct ApiTraits<ApiEntry::name> {                               \
    using return_type = ret;                                       \
    using fn_type = ret(*) params;                                 \
    static constexpr FailureShape failure = FailureShape::shape;   \
  };
#define OCLMINE_TRAITS_CODE(name, params, args) OCLMINE_TRAITS(ReturnCode, cl_int, name, params)
#define OCLMINE_TRAITS_ERR(ret, name, params, args) OCLMINE_TRAITS(ErrcodeOut, ret, name, params)
#define OCLMINE_TRAITS_PTR(name, params, args) OCLMINE_TRAITS(NullOnly, void*, name, params)
OCLMINE_CL_API(OCLMINE_TRAITS_CODE, OCLMINE_TRAITS_ERR, OCLMINE_TRAITS_PTR)
#undef OCLMINE_TRAITS_CODE
#undef OCLMINE_TRAITS_ERR
#undef OCLMINE_TRAITS_PTR
#undef OCLMINE_TRAITS

enum class LoadStatus {
  Ok,
  NotFound,      // the OS could not open the library
  PathConflict,  // already loaded from a different path
};

inline const char* to_string(LoadStatus s) {
  switch (s) {
    case LoadStatus::Ok: return "ok";
    case LoadStatus::NotFound: return "not found";
    case LoadStatus::PathConflict: return "already loaded from another path";
  }
  return "?";
}

/// Conventional locations of the OpenCL driver, probed in order.
inline std::vector<std::string> default_library_candidates() {
  return {
      "libOpenCL.so",
      "libOpenCL.so.1",
      "/system/vendor/lib64/libOpenCL.so",
      "/vendor/lib64/libOpenCL.so",
      "/system/lib64/libOpenCL.so",
      "/system/vendor/lib/libOpenCL.so",
      "/vendor/lib/libOpenCL.so",
      "/system/lib/libOpenCL.so",
      "/usr/lib/x86_64-linux-gnu/libOpenCL.so.1",
      "/usr/lib/aarch64-linux-gnu/libOpenCL.so.1",
  };
}

/// Loads the native OpenCL library at runtime and forwards calls to it.
///
/// Every call goes through the same steps: take the read side of the lock;
/// if nothing is loaded return kNotLoaded; if the entry point was resolved
/// before, forward; otherwise drop to the write side, dlsym the entry point,
/// cache it and retry. Forwarding happens under the read lock, so unload()
/// waits for in-flight calls and no call ever reaches an unloaded library.
class Loader {
 public:
  Loader() = default;
  Loader(const Loader&) = delete;
  Loader& operator=(const Loader&) = delete;
  ~Loader() { unload(); }

  LoadStatus load(const std::string& path) {
    auto guard = acquire_write(lock_);
    if (handle_ != nullptr) {
      return path == path_ ? LoadStatus::Ok : LoadStatus::PathConflict;
    }
    dlerror();
    void* handle = dlopen(path.c_str(), RTLD_NOW | RTLD_LOCAL);
    if (handle == nullptr) {
      const char* err = dlerror();
      last_error_ = err != nullptr ? err : ("cannot open " + path);
      return LoadStatus::NotFound;
    }
    handle_ = handle;
    path_ = path;
    symbols_.fill(nullptr);
    last_error_.clear();
    return LoadStatus::Ok;
  }

  /// Tries `explicit_path` if given, then $OPENCL_LIB_PATH, then the
  /// conventional locations.
  LoadStatus load_default(const std::string& explicit_path = {}) {
    std::vector<std::string> candidates;
    if (!explicit_path.empty()) {
      candidates.push_back(explicit_path);
    } else {
      if (const char* env = std::getenv("OPENCL_LIB_PATH"); env != nullptr && *env != '\0') {
        candidates.emplace_back(env);
      }
      for (auto& c : default_library_candidates()) candidates.push_back(std::move(c));
    }
    std::string errors;
    for (const auto& c : candidates) {
      const LoadStatus s = load(c);
      if (s != LoadStatus::NotFound) return s;
      errors += last_error() + "; ";
    }
    auto guard = acquire_write(lock_);
    last_error_ = errors;
    return LoadStatus::NotFound;
  }

  void unload() {
    auto guard = acquire_write(lock_);
    if (handle_ == nullptr) return;
    // The OS decides whether the mapping actually goes away.
    dlclose(handle_);
    handle_ = nullptr;
    path_.clear();
    symbols_.fill(nullptr);
  }

  bool is_loaded() const {
    auto guard = acquire_read(lock_);
    return handle_ != nullptr;
  }

  std::string library_path() const {
    auto guard = acquire_read(lock_);
    return path_;
  }

  std::string last_error() const {
    auto guard = acquire_read(lock_);
    return last_error_;
  }

  // Entry points currently in the symbol cache.
  std::size_t resolved_count() const {
    auto guard = acquire_read(lock_);
    std::size_t n = 0;
    for (void* s : symbols_) n += s != nullptr ? 1 : 0;
    return n;
  }

  bool is_resolved(ApiEntry e) const {
    auto guard = acquire_read(lock_);
    return symbols_[static_cast<std::size_t>(e)] != nullptr;
  }

  // dlsym lookups performed over the loader's lifetime.
  std::uint64_t lookups() const { return lookups_.load(std::memory_order_relaxed); }

  // Arguments convert to the entry point's parameter types, so literal 0 and
  // nullptr work where the C API takes pointers.
  template <ApiEntry E, class... Args>
  typename ApiTraits<E>::return_type call(Args&&... args) {
    return call_as<E>(static_cast<typename ApiTraits<E>::fn_type>(nullptr), std::forward<Args>(args)...);
  }

 private:
  template <ApiEntry E, class R, class... P, class... Args>
  R call_as(R (*)(P...), Args&&... args) {
    return call_exact<E, P...>(std::forward<Args>(args)...);
  }

  template <ApiEntry E, class... Args>
  typename ApiTraits<E>::return_type call_exact(Args... args) {
    using Traits = ApiTraits<E>;
    using Fn = typename Traits::fn_type;
    constexpr auto index = static_cast<std::size_t>(E);

    for (;;) {
      {
        auto guard = acquire_read(lock_);
        if (handle_ == nullptr) return fail<E>(kNotLoaded, args...);
        if (void* sym = symbols_[index]; sym != nullptr) {
          return reinterpret_cast<Fn>(sym)(args...);
        }
        // A call made from inside a forwarded call (same thread, read lock
        // already held) cannot move to the write side; resolve without caching.
        if (lock_.read_depth_of_caller() > 1) {
          void* sym = lookup(index);
          if (sym == nullptr) return fail<E>(kSymbolMissing, args...);
          return reinterpret_cast<Fn>(sym)(args...);
        }
      }
      {
        auto guard = acquire_write(lock_);
        if (handle_ == nullptr) return fail<E>(kNotLoaded, args...);
        if (symbols_[index] == nullptr) {
          void* sym = lookup(index);
          if (sym == nullptr) return fail<E>(kSymbolMissing, args...);
          symbols_[index] = sym;
        }
      }
    }
  }

  void* lookup(std::size_t index) {
    lookups_.fetch_add(1, std::memory_order_relaxed);
    return dlsym(handle_, kApiNames[index]);
  }

  template <ApiEntry E, class... Args>
  static typename ApiTraits<E>::return_type fail(cl_int code, Args... args) {
    using Traits = ApiTraits<E>;
    if constexpr (Traits::failure == FailureShape::ReturnCode) {
      return code;
    } else if constexpr (Traits::failure == FailureShape::ErrcodeOut) {
      cl_int* errcode_ret = std::get<sizeof...(Args) - 1>(std::tuple<Args...>(args...));
      if (errcode_ret != nullptr) *errcode_ret = code;
      return nullptr;
    } else {
      return nullptr;
    }
  }

  mutable RwLockWP lock_;
  void* handle_ = nullptr;
  std::string path_;
  std::string last_error_;
  std::array<void*, kApiCount> symbols_{};
  std::atomic<std::uint64_t> lookups_{0};
};

/// The process-wide loader behind the oclmine::cl wrappers.
inline Loader& global_loader() {
  static Loader loader;
  return loader;
}

}  // namespace oclmine::ocl

namespace oclmine::cl {

// One wrapper per entry point, same name and signature as the C API, bound to
// the process-wide loader. Existing OpenCL host code compiles against these
// unchanged after `using namespace oclmine::cl;`.
#define OCLMINE_WRAP_CODE(name, params, args) \
  inline cl_int name params { return ::oclmine::ocl::global_loader().call<::oclmine::ocl::ApiEntry::name> args; }
#define OCLMINE_WRAP_ERR(ret, name, params, args) \
  inline ret name params { return ::oclmine::ocl::global_loader().call<::oclmine::ocl::ApiEntry::name> args; }
#define OCLMINE_WRAP_PTR(name, params, args) \
  inline void* name params { return ::oclmine::ocl::global_loader().call<::oclmine::ocl::ApiEntry::name> args; }
OCLMINE_CL_API(OCLMINE_WRAP_CODE, OCLMINE_WRAP_ERR, OCLMINE_WRAP_PTR)
#undef OCLMINE_WRAP_CODE
#undef OCLMINE_WRAP_ERR
#undef OCLMINE_WRAP_PTR

}  // namespace oclmine::cl
