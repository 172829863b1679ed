#pragma once

#include <cmath>
#include <vector>

#include "cliplab/rng.hpp"
#include "cliplab/vector.hpp"

namespace cliplab::testing {

inline Vector random_gaussian(Rng& rng, std::size_t d, double scale = 1.0) {
  Vector v(d);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

/// Random strictly interior simplex point (normalized exponentials).
inline Vector random_simplex(Rng& rng, std::size_t d) {
  Vector v(d);
  double s = 0.0;
  for (auto& x : v) {
    x = -std::log(rng.uniform_open_zero()) + 1e-3;
    s += x;
  }
  for (auto& x : v) x /= s;
  return v;
}

inline Vector random_in_ball(Rng& rng, const Vector& center, double radius) {
  Vector v = random_gaussian(rng, center.size());
  const double n = norm2(v);
  const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(center.size()));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = center[i] + r * v[i] / n;
  return v;
}

}  // namespace cliplab::testing
