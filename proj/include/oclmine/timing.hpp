#pragma once

#include <chrono>
#include <cstdint>

namespace oclmine {

using Clock = std::chrono::steady_clock;

inline std::int64_t elapsed_ns(Clock::time_point from, Clock::time_point to) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(to - from).count();
}

// Time spent bringing a backend's resources up and down, kept apart from the
// algorithm interval.
struct SetupTiming {
  std::int64_t setup_ns = 0;
  std::int64_t teardown_ns = 0;

  std::int64_t overhead_ns() const { return setup_ns + teardown_ns; }
};

// Four contiguous marks: [start, ready) is setup, [ready, done) is the
// algorithm, [done, end) is teardown. The intervals share endpoints, so
// total_ns() == setup_ns + wall_ns + teardown_ns == end - start exactly.
struct RunTiming {
  std::int64_t setup_ns = 0;
  std::int64_t wall_ns = 0;
  std::int64_t teardown_ns = 0;
  Clock::time_point start{}, ready{}, done{}, end{};

  std::int64_t total_ns() const { return setup_ns + wall_ns + teardown_ns; }
  std::int64_t overhead_ns() const { return setup_ns + teardown_ns; }
  SetupTiming overhead() const { return {setup_ns, teardown_ns}; }

  static RunTiming from_marks(Clock::time_point start, Clock::time_point ready,
                              Clock::time_point done, Clock::time_point end) {
    return {elapsed_ns(start, ready), elapsed_ns(ready, done), elapsed_ns(done, end),
            start, ready, done, end};
  }

  // Same algorithm interval, wider setup/teardown brackets.
  RunTiming widened(Clock::time_point outer_start, Clock::time_point outer_end) const {
    return from_marks(outer_start, ready, done, outer_end);
  }
};

template <class T>
struct Timed {
  T value;
  RunTiming timing;
};

}  // namespace oclmine
