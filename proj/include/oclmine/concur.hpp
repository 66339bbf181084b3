#pragma once

#include <condition_variable>
#include <cstddef>
#include <mutex>
#include <shared_mutex>
#include <system_error>
#include <thread>
#include <unordered_map>

namespace oclmine {

/// Reentrant, writer-preferred reader/writer lock.
///
/// Readers share access. Once a writer is waiting, readers that do not
/// already hold the lock queue up behind it; readers that already hold it may
/// re-enter without blocking, so a thread can nest read sections freely.
/// The writer enters once every reader that was inside when it arrived has
/// left.
///
/// Write access is not reentrant, and a thread holding read access may not
/// request write access: both are reported as
/// std::errc::resource_deadlock_would_occur instead of hanging.
///
/// Satisfies SharedMutex, so std::shared_lock / std::unique_lock work as
/// guards.
class RwLockWP {
 public:
  RwLockWP() = default;
  RwLockWP(const RwLockWP&) = delete;
  RwLockWP& operator=(const RwLockWP&) = delete;

  void lock_shared() {
    std::unique_lock guard(mutex_);
    const auto self = std::this_thread::get_id();
    if (auto it = read_holds_.find(self); it != read_holds_.end()) {
      ++it->second;
      return;
    }
    if (writer_active_ && writer_id_ == self) {
      throw std::system_error(std::make_error_code(std::errc::resource_deadlock_would_occur),
                              "RwLockWP: read requested while holding write access");
    }
    readers_cv_.wait(guard, [&] { return !writer_active_ && writers_waiting_ == 0; });
    read_holds_.emplace(self, 1);
  }

  bool try_lock_shared() {
    std::lock_guard guard(mutex_);
    const auto self = std::this_thread::get_id();
    if (auto it = read_holds_.find(self); it != read_holds_.end()) {
      ++it->second;
      return true;
    }
    if (writer_active_ || writers_waiting_ > 0) return false;
    read_holds_.emplace(self, 1);
    return true;
  }

  void unlock_shared() {
    std::lock_guard guard(mutex_);
    auto it = read_holds_.find(std::this_thread::get_id());
    if (it == read_holds_.end()) {
      throw std::system_error(std::make_error_code(std::errc::operation_not_permitted),
                              "RwLockWP: unlock_shared without read access");
    }
    if (--it->second == 0) {
      read_holds_.erase(it);
      if (read_holds_.empty() && writers_waiting_ > 0) writer_cv_.notify_all();
    }
  }

  void lock() {
    std::unique_lock guard(mutex_);
    check_can_write(std::this_thread::get_id());
    ++writers_waiting_;
    writer_cv_.wait(guard, [&] { return !writer_active_ && read_holds_.empty(); });
    --writers_waiting_;
    writer_active_ = true;
    writer_id_ = std::this_thread::get_id();
  }

  bool try_lock() {
    std::lock_guard guard(mutex_);
    check_can_write(std::this_thread::get_id());
    if (writer_active_ || !read_holds_.empty()) return false;
    writer_active_ = true;
    writer_id_ = std::this_thread::get_id();
    return true;
  }

  void unlock() {
    {
      std::lock_guard guard(mutex_);
      if (!writer_active_ || writer_id_ != std::this_thread::get_id()) {
        throw std::system_error(std::make_error_code(std::errc::operation_not_permitted),
                                "RwLockWP: unlock without write access");
      }
      writer_active_ = false;
      writer_id_ = {};
    }
    // Other writers get the lock first; readers re-check writers_waiting_.
    writer_cv_.notify_all();
    readers_cv_.notify_all();
  }

  // Introspection, mainly for scripted interleaving tests.
  std::size_t writers_waiting() const {
    std::lock_guard guard(mutex_);
    return writers_waiting_;
  }
  std::size_t active_readers() const {
    std::lock_guard guard(mutex_);
    return read_holds_.size();
  }
  std::size_t read_depth_of_caller() const {
    std::lock_guard guard(mutex_);
    auto it = read_holds_.find(std::this_thread::get_id());
    return it == read_holds_.end() ? 0 : it->second;
  }
  bool writer_active() const {
    std::lock_guard guard(mutex_);
    return writer_active_;
  }

 private:
  void check_can_write(std::thread::id self) const {
    if (read_holds_.count(self) != 0) {
      throw std::system_error(std::make_error_code(std::errc::resource_deadlock_would_occur),
                              "RwLockWP: read-to-write upgrade is not supported");
    }
    if (writer_active_ && writer_id_ == self) {
      throw std::system_error(std::make_error_code(std::errc::resource_deadlock_would_occur),
                              "RwLockWP: write access is not reentrant");
    }
  }

  mutable std::mutex mutex_;
  std::condition_variable readers_cv_;
  std::condition_variable writer_cv_;
  std::unordered_map<std::thread::id, std::size_t> read_holds_;
  std::size_t writers_waiting_ = 0;
  bool writer_active_ = false;
  std::thread::id writer_id_;
};

using ReadGuard = std::shared_lock<RwLockWP>;
using WriteGuard = std::unique_lock<RwLockWP>;

[[nodiscard]] inline ReadGuard acquire_read(RwLockWP& lock) { return ReadGuard(lock); }
[[nodiscard]] inline WriteGuard acquire_write(RwLockWP& lock) { return WriteGuard(lock); }

/// Shared abort flag. Polled under the read side of an RwLockWP, set under
/// the write side: a pending cancel() holds off new pollers, so every check
/// that starts after cancel() returns sees the flag.
class CancellationToken {
 public:
  void cancel() {
    auto guard = acquire_write(lock_);
    cancelled_ = true;
  }

  bool is_cancelled() const {
    auto guard = acquire_read(lock_);
    return cancelled_;
  }

  // Harness reuse between passes.
  void reset() {
    auto guard = acquire_write(lock_);
    cancelled_ = false;
  }

 private:
  mutable RwLockWP lock_;
  bool cancelled_ = false;
};

}  // namespace oclmine
