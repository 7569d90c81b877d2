#pragma once

#include <cstdint>
#include <random>

namespace radarsr {

/// Deterministic random stream. The engine is std::mt19937_64 (its output sequence is
/// fixed by the standard); all distributions are derived here rather than through
/// <random> distributions, whose algorithms are implementation-defined.
///
///   uniform()     : (u64 >> 11) * 2^-53, in [0, 1)
///   normal()      : Box-Muller on two uniforms, both outputs used in order
///   exponential() : -log(1 - uniform())
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);
  double normal();
  double exponential();
  bool bernoulli(double p) { return uniform() < p; }

  /// Child seed for an independent stream, a pure function of (seed, stream).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);
  SeededRng child(std::uint64_t stream) const { return SeededRng(derive(seed_, stream)); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace radarsr
