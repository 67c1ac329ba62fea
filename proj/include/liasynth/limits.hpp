#pragma once

#include <chrono>
#include <cstdint>
#include <optional>

namespace liasynth {

using Clock = std::chrono::steady_clock;

/// Resource bounds threaded through the solvers. Exceeding one throws
/// ResourceLimit.
struct Limits {
  std::optional<Clock::time_point> deadline;
  std::uint64_t max_bb_nodes = 200000;

  static Limits with_timeout(double seconds);
  bool expired() const { return deadline && Clock::now() > *deadline; }
  /// Throws ResourceLimit if the deadline passed.
  void check() const;
};

}  // namespace liasynth
