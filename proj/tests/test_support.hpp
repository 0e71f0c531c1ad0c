#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "smoothforge/rng.hpp"
#include "smoothforge/table.hpp"

namespace testdata {

inline smoothforge::DataTable frame(std::vector<std::string> names, std::vector<std::vector<double>> cols) {
  smoothforge::DataTable t;
  t.names = std::move(names);
  t.columns = std::move(cols);
  return t;
}

inline std::vector<double> uniform(smoothforge::Rng& r, std::size_t n, double lo = 0, double hi = 1) {
  std::vector<double> v(n);
  for (auto& x : v) x = lo + (hi - lo) * r.uniform();
  return v;
}

/// Log-gamma additive model data with covariates x0..x3 on (0, 1).
inline smoothforge::DataTable gamma_frame(std::size_t n = 400, std::uint64_t seed = 1) {
  smoothforge::Rng r(seed);
  auto x0 = uniform(r, n), x1 = uniform(r, n), x2 = uniform(r, n), x3 = uniform(r, n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double eta = 0.5 + 0.6 * std::sin(std::numbers::pi * x0[i]) + 0.4 * x1[i] * x2[i] + 0.2 * x3[i];
    const double shape = 3.0;
    y[i] = r.gamma(shape, shape / std::exp(eta));
  }
  return frame({"y", "x0", "x1", "x2", "x3"}, {y, x0, x1, x2, x3});
}

/// Binary union membership against a skewed wage covariate.
inline smoothforge::DataTable union_frame(std::size_t n = 534, std::uint64_t seed = 2) {
  smoothforge::Rng r(seed);
  std::vector<double> wage(n), member(n);
  for (std::size_t i = 0; i < n; ++i) {
    wage[i] = std::round(std::min(44.5, std::exp(2.1 + 0.5 * r.normal())) * 100) / 100;
    const double eta = -2.2 + 0.12 * wage[i] - 0.0025 * wage[i] * wage[i];
    member[i] = r.uniform() < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : 0.0;
  }
  return frame({"union.member", "wage"}, {member, wage});
}

/// Repeated growth measurements: 13 measurement days, binary ozone treatment per tree.
inline smoothforge::DataTable sitka_frame(int trees = 79, std::uint64_t seed = 3) {
  smoothforge::Rng r(seed);
  const double days[] = {152, 174, 201, 227, 258, 469, 496, 528, 556, 579, 613, 639, 674};
  std::vector<double> size, day, ozone, id;
  for (int t = 0; t < trees; ++t) {
    const double oz = t % 3 == 0 ? 0.0 : 1.0;
    const double tree_effect = 0.3 * r.normal();
    for (double d : days) {
      day.push_back(d);
      ozone.push_back(oz);
      id.push_back(t + 1);
      size.push_back(4.0 + 2.2 / (1.0 + std::exp(-(d - 350) / 90)) - 0.2 * oz + tree_effect + 0.1 * r.normal());
    }
  }
  return frame({"log.size", "days", "ozone", "id.num"}, {size, day, ozone, id});
}

/// y = sin(2 pi x) + N(0, sigma^2), x uniform on (0, 1).
inline smoothforge::DataTable sine_frame(std::size_t n = 200, double sigma = 0.2, std::uint64_t seed = 4) {
  smoothforge::Rng r(seed);
  auto x = uniform(r, n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = std::sin(2 * std::numbers::pi * x[i]) + sigma * r.normal();
  return frame({"y", "x"}, {y, x});
}

}  // namespace testdata
