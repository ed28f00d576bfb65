#include "simnet/sim/random.h"

#include <cstdio>
#include <limits>

#include "simnet/sim/time.h"

namespace simnet::sim {

std::string FormatTime(SimTime t) {
  const std::int64_t ns = t.count();
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%lld.%09lld",
                static_cast<long long>(ns / 1'000'000'000),
                static_cast<long long>(ns % 1'000'000'000));
  return buffer;
}

std::uint64_t Fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::string_view name, std::uint64_t seed)
    : engine_(SplitMix64(seed ^ Fnv1a64(name))) {}

std::uint64_t RandomStream::UniformInt(std::uint64_t lo, std::uint64_t hi) {
  if (hi <= lo) return lo;
  const std::uint64_t span = hi - lo;
  if (span == std::numeric_limits<std::uint64_t>::max()) return Next();
  const std::uint64_t range = span + 1;
  // 2^64 mod range; draws below it would bias the low residues.
  const std::uint64_t threshold = (0 - range) % range;
  std::uint64_t draw;
  do {
    draw = Next();
  } while (draw < threshold);
  return lo + draw % range;
}

double RandomStream::UniformReal() {
  return static_cast<double>(Next() >> 11) * 0x1.0p-53;
}

SimTime RandomStream::UniformTime(SimTime lo, SimTime hi) {
  if (hi <= lo) return lo;
  return SimTime(static_cast<std::int64_t>(
      UniformInt(static_cast<std::uint64_t>(lo.count()),
                 static_cast<std::uint64_t>(hi.count()))));
}

}  // namespace simnet::sim
