#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace clickbench {

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed for one (benchmark seed, task index, repetition) cell:
/// mix64(mix64(mix64(seed) ^ task) ^ rep). Distinct streams per cell, stable
/// across platforms.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t task_index, std::uint64_t rep = 0);

/// Seeded generator whose output stream is fully pinned, so that scripted
/// agents and the generators replay bit-for-bit:
///
///   engine     std::mt19937_64 (output sequence fixed by the C++ standard)
///   uniform()  (engine() >> 11) * 2^-53, in [0, 1)
///   normal()   Box-Muller: u1 = 1 - uniform(), u2 = uniform(),
///              r = sqrt(-2 ln u1); returns r cos(2 pi u2), and the next
///              call returns the cached r sin(2 pi u2)
///
/// std::*_distribution is not used because its algorithms are unspecified.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Inclusive integer range.
  int uniform_int(int lo, int hi);
  double normal();
  double normal(double mean, double sigma) { return mean + sigma * normal(); }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace clickbench
