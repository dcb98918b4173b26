#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

namespace blcs::sim {

/// Independent streams of one run.
enum class Stream : std::uint64_t { traffic = 1, affairs, behavior, loss, injection, split, training, acceptance };

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, Stream s, std::uint64_t round = 0) {
  return splitmix64(splitmix64(seed) ^ splitmix64(static_cast<std::uint64_t>(s) * 0x100000001b3ULL + round));
}

/// mt19937_64 with distribution code kept here so results do not depend on
/// the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}

  std::uint64_t next() { return g_(); }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  /// Uniform index in [0, n).
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
  int range(int lo, int hi) { return lo + static_cast<int>(index(static_cast<std::size_t>(hi - lo + 1))); }
  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

 private:
  std::mt19937_64 g_;
};

}  // namespace blcs::sim
