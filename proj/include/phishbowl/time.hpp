#pragma once

#include <chrono>
#include <cstdint>
#include <functional>

namespace phishbowl {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Clock = std::function<Timestamp()>;

inline Timestamp from_millis(std::int64_t ms) {
  return Timestamp(std::chrono::milliseconds(ms));
}

inline std::int64_t to_millis(Timestamp t) { return t.time_since_epoch().count(); }

inline Timestamp system_now() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(
      std::chrono::system_clock::now());
}

/// Fractional days from `from` to `to`.
inline double days_between(Timestamp from, Timestamp to) {
  return static_cast<double>((to - from).count()) / 86'400'000.0;
}

/// UTC calendar day number since the epoch.
inline std::int64_t day_index(Timestamp t) {
  return std::chrono::floor<std::chrono::days>(t).time_since_epoch().count();
}

}  // namespace phishbowl
