#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace speckle {

// Role of a draw within one trial. Streams for distinct roles are independent
// even when (seed, trial, look) coincide, so the three noise sources of a look
// never share an engine and parallel execution order cannot change results.
enum class StreamRole : std::uint64_t {
  operator_entries = 1,
  speckle = 2,
  additive = 3,
  signal_levels = 4,
  signal_breaks = 5,
  optimizer_init = 6,
  mc_trial = 7,
};

// Key of one reproducible standard-normal / uniform stream. Identical keys
// reproduce identical draw sequences; distinct keys give statistically
// independent streams. Draw order within a stream is part of the contract.
struct RandomStream {
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  std::uint64_t look = 0;
  StreamRole role = StreamRole::mc_trial;

  std::mt19937_64 engine() const;

  std::vector<double> normals(std::size_t count) const;
  std::vector<double> uniforms(std::size_t count, double lo, double hi) const;
  // count distinct integers drawn uniformly from {lo, ..., hi}, sorted.
  std::vector<std::int64_t> distinct_ints(std::size_t count, std::int64_t lo,
                                          std::int64_t hi) const;
};

// SplitMix64-style avalanche combine; used to derive per-cell seeds.
std::uint64_t mix64(std::uint64_t h, std::uint64_t v);

}  // namespace speckle
