#include "smoothforge/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace smoothforge {

double Rng::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::gamma(double shape, double rate) {
  if (shape < 1.0) {
    // G(a) = G(a + 1) U^(1/a), combined on the log scale to delay underflow.
    const double g = gamma(shape + 1.0, 1.0);
    const double v = std::exp(std::log(g) + std::log(uniform()) / shape) / rate;
    return v > 0 ? v : std::numeric_limits<double>::denorm_min();
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

}  // namespace smoothforge
