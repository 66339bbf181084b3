#pragma once

#include <dlfcn.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "oclmine/dataset.hpp"
#include "oclmine/random.hpp"
#include "stub/ocl_stub.h"

namespace support {

inline constexpr const char* kStubPath = OCLMINE_STUB_PATH;
inline constexpr const char* kFixtureDir = OCLMINE_FIXTURE_DIR;

/// The stub driver's instrumentation functions. Holds its own handle, which
/// keeps the library mapped while loaders open and close it, so counters
/// survive unload/reload cycles.
struct Stub {
  void* handle = nullptr;
  decltype(&stub_reset) reset = nullptr;
  decltype(&stub_call_count) call_count = nullptr;
  decltype(&stub_in_flight) in_flight = nullptr;
  decltype(&stub_live_objects) live_objects = nullptr;
  decltype(&stub_created) created = nullptr;
  decltype(&stub_released) released = nullptr;
  decltype(&stub_launch_count) launch_count = nullptr;
  decltype(&stub_violations) violations = nullptr;
  decltype(&stub_set_devices) set_devices = nullptr;
  decltype(&stub_set_probe) set_probe = nullptr;
  decltype(&stub_set_launch_hook) set_launch_hook = nullptr;
  decltype(&stub_fail) fail = nullptr;
  decltype(&stub_last_build_options) last_build_options = nullptr;

  static Stub& get() {
    static Stub s = open();
    return s;
  }

  long live_total() const {
    long total = 0;
    for (int k = 0; k < STUB_KIND_COUNT; ++k) total += live_objects(k);
    return total;
  }

 private:
  template <class F>
  static void bind(void* h, F& f, const char* name) {
    f = reinterpret_cast<F>(dlsym(h, name));
    if (f == nullptr) throw std::runtime_error(std::string("stub lacks ") + name);
  }

  static Stub open() {
    Stub s;
    s.handle = dlopen(kStubPath, RTLD_NOW | RTLD_LOCAL);
    if (s.handle == nullptr) throw std::runtime_error(std::string("cannot open stub: ") + dlerror());
    bind(s.handle, s.reset, "stub_reset");
    bind(s.handle, s.call_count, "stub_call_count");
    bind(s.handle, s.in_flight, "stub_in_flight");
    bind(s.handle, s.live_objects, "stub_live_objects");
    bind(s.handle, s.created, "stub_created");
    bind(s.handle, s.released, "stub_released");
    bind(s.handle, s.launch_count, "stub_launch_count");
    bind(s.handle, s.violations, "stub_violations");
    bind(s.handle, s.set_devices, "stub_set_devices");
    bind(s.handle, s.set_probe, "stub_set_probe");
    bind(s.handle, s.set_launch_hook, "stub_set_launch_hook");
    bind(s.handle, s.fail, "stub_fail");
    bind(s.handle, s.last_build_options, "stub_last_build_options");
    return s;
  }
};

/// Uniform points in [0, extent)^d, rounded to float.
inline oclmine::Dataset uniform_dataset(std::size_t n, std::size_t d, std::uint64_t seed, double extent) {
  oclmine::Rng rng(seed);
  std::vector<float> v(n * d);
  for (auto& x : v) x = static_cast<float>(oclmine::uniform_real(rng, 0.0, extent));
  return oclmine::Dataset(n, d, v);
}

}  // namespace support
