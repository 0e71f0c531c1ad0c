#pragma once

#include <cstdint>
#include <random>

namespace smoothforge {

/// mt19937_64 with hand-written variate transforms. The standard's
/// distributions are implementation-defined, so they are not used: draws are
/// identical on every conforming platform for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal (Box-Muller, one draw per call).
  double normal();
  /// Gamma with the given shape and rate (Marsaglia-Tsang).
  double gamma(double shape, double rate);

 private:
  std::mt19937_64 engine_;
};

}  // namespace smoothforge
