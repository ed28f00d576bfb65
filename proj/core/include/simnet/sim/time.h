#ifndef SIMNET_SIM_TIME_H_
#define SIMNET_SIM_TIME_H_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>

namespace simnet::sim {

// Simulated time: nanoseconds since simulation start.
using SimTime = std::chrono::nanoseconds;

inline SimTime FromSeconds(double seconds) {
  return SimTime(static_cast<std::int64_t>(std::llround(seconds * 1e9)));
}

inline double ToSeconds(SimTime t) { return static_cast<double>(t.count()) / 1e9; }

// Whole seconds, rounded down.
inline std::int64_t WholeSeconds(SimTime t) {
  return std::chrono::duration_cast<std::chrono::seconds>(t).count();
}

// "12.345678901" with nanosecond precision.
std::string FormatTime(SimTime t);

}  // namespace simnet::sim

#endif  // SIMNET_SIM_TIME_H_
