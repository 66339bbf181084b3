#pragma once

#include <cstdint>

namespace oclmine {

using Label = std::uint16_t;

inline constexpr unsigned kFlagBits = 3;
inline constexpr Label kMaxClusterId = 8191;  // 13-bit id field
inline constexpr Label kNoise = 0;

/// 16-bit per-point word shared by host and device code.
///
///   bit 0      visited
///   bit 1      reached by the last main-loop neighbor search
///   bit 2      reached by the last expansion neighbor search
///   bits 3-15  cluster id, 0 = noise
///
/// The reach bits are written by the device kernels; host-only backends leave
/// them clear. Values handed back to callers are the bare cluster id.
class PointState {
 public:
  static constexpr std::uint16_t kVisited = 1u << 0;
  static constexpr std::uint16_t kReachMain = 1u << 1;
  static constexpr std::uint16_t kReachExpand = 1u << 2;
  static constexpr std::uint16_t kFlagMask = (1u << kFlagBits) - 1;

  constexpr PointState() = default;
  constexpr explicit PointState(std::uint16_t word) : word_(word) {}

  constexpr std::uint16_t word() const { return word_; }
  constexpr bool visited() const { return (word_ & kVisited) != 0; }
  constexpr bool has(std::uint16_t flag) const { return (word_ & flag) != 0; }
  constexpr Label cluster() const { return static_cast<Label>(word_ >> kFlagBits); }
  constexpr bool is_noise() const { return cluster() == kNoise; }

  constexpr void mark_visited() { word_ |= kVisited; }
  constexpr void set_cluster(Label id) {
    word_ = static_cast<std::uint16_t>((id << kFlagBits) | (word_ & kFlagMask));
  }

  // Final form: flags dropped, id shifted down.
  constexpr Label to_label() const { return cluster(); }

 private:
  std::uint16_t word_ = 0;
};

static_assert(sizeof(PointState) == sizeof(std::uint16_t));

}  // namespace oclmine
