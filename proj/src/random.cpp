#include "speckle/random.hpp"

#include <algorithm>
#include <numeric>

#include "speckle/errors.hpp"

namespace speckle {

std::uint64_t mix64(std::uint64_t h, std::uint64_t v) {
  h += 0x9e3779b97f4a7c15ULL + v;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  return h ^ (h >> 31);
}

std::mt19937_64 RandomStream::engine() const {
  std::uint64_t s = mix64(seed, 0x5ca1ab1e0ddba11ULL);
  s = mix64(s, trial);
  s = mix64(s, look);
  s = mix64(s, static_cast<std::uint64_t>(role));
  return std::mt19937_64(s);
}

std::vector<double> RandomStream::normals(std::size_t count) const {
  auto rng = engine();
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> out(count);
  for (auto& x : out) x = dist(rng);
  return out;
}

std::vector<double> RandomStream::uniforms(std::size_t count, double lo,
                                           double hi) const {
  auto rng = engine();
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> out(count);
  for (auto& x : out) x = dist(rng);
  return out;
}

std::vector<std::int64_t> RandomStream::distinct_ints(std::size_t count,
                                                      std::int64_t lo,
                                                      std::int64_t hi) const {
  if (hi < lo || count > static_cast<std::size_t>(hi - lo + 1)) {
    throw InvalidArgument("distinct_ints: range smaller than requested count");
  }
  std::vector<std::int64_t> pool(static_cast<std::size_t>(hi - lo + 1));
  std::iota(pool.begin(), pool.end(), lo);
  auto rng = engine();
  // partial Fisher-Yates; only the first `count` slots are needed
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace speckle
