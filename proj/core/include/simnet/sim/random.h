#ifndef SIMNET_SIM_RANDOM_H_
#define SIMNET_SIM_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

#include "simnet/sim/time.h"

namespace simnet::sim {

// Seeded random stream with platform-stable output.
//
// The engine is std::mt19937_64, whose output sequence the C++ standard fixes.
// Its seed is SplitMix64(seed ^ FNV-1a-64(name)). Standard distributions are
// not used because their algorithms are implementation-defined; integer
// draws use rejection sampling and real draws use the top 53 bits.
class RandomStream {
 public:
  RandomStream(std::string_view name, std::uint64_t seed);

  std::uint64_t Next() { return engine_(); }

  // Uniform on [lo, hi], inclusive.
  std::uint64_t UniformInt(std::uint64_t lo, std::uint64_t hi);

  // Uniform on [0, 1).
  double UniformReal();

  // Uniform on [lo, hi], nanosecond resolution.
  SimTime UniformTime(SimTime lo, SimTime hi);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t Fnv1a64(std::string_view bytes);
std::uint64_t SplitMix64(std::uint64_t x);

}  // namespace simnet::sim

#endif  // SIMNET_SIM_RANDOM_H_
