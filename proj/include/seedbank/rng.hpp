#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace seedbank {

using Rng = std::mt19937_64;

/// Experiment tags that key derived streams. Values are part of the
/// reproducibility contract: changing one changes every output keyed by it.
enum class StreamTag : std::uint64_t {
  Tmrca = 1,
  Grid = 2,
  NotCdi = 3,
  DeactivationCount = 4,
  DualLhs = 5,
  DualRhs = 6,
  Partition = 7,
  Exchangeability = 8,
  HittingWalk = 9,
  Ancestral = 10,
  Misc = 99,
};

namespace detail {
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Seed for the stream owned by (master seed, experiment, replicate).
constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t experiment,
                                    std::uint64_t replicate) {
  std::uint64_t h = detail::splitmix64(master);
  h = detail::splitmix64(h ^ experiment);
  return detail::splitmix64(h ^ replicate);
}

inline Rng make_stream(std::uint64_t master, StreamTag tag, std::uint64_t replicate,
                       std::uint64_t sub = 0) {
  const auto experiment = (static_cast<std::uint64_t>(tag) << 32) ^ sub;
  return Rng(stream_seed(master, experiment, replicate));
}

/// Uniform on [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Exp(rate) by inversion; rate must be positive.
inline double exponential(Rng& rng, double rate) {
  return -std::log1p(-uniform01(rng)) / rate;
}

}  // namespace seedbank
