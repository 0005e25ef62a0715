#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "arthro/geometry.h"

namespace arthro {

/// Seeded generator used by every stochastic routine. Distributions are
/// implemented here on top of the raw 64-bit engine, whose output sequence is
/// fixed by the standard, so results do not depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent generator for sub-stream `stream`, derived by a splitmix64 hash.
  static Rng derive(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  double normal();
  Vec3 normal3() { return {normal(), normal(), normal()}; }
  Vec3 unit_vector();
  Rotation rotation();
  /// k distinct indices from [0, n), in draw order.
  std::vector<std::size_t> sample(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace arthro
