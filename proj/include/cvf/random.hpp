#pragma once

#include <cstdint>
#include <random>

namespace cvf {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for replication `index` of stream `stream`. Replication results depend
/// only on this value, never on thread count or scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                    std::uint64_t index) {
  return mix64(mix64(mix64(master) ^ (stream * 0xd1342543de82ef95ULL)) ^ index);
}

/// Named seed streams. Calibration and rejection estimation never share one.
enum class Stream : std::uint64_t {
  Calibration = 1,
  CheckGrid = 2,
  Fresh = 3,
  Power = 4,
  Surface = 5,
  Baseline = 6,
  Limit = 7,
  Finite = 8,
};

constexpr std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                                    std::uint64_t index) {
  return derive_seed(master, static_cast<std::uint64_t>(stream), index);
}

}  // namespace cvf
