#pragma once

#include <functional>
#include <optional>
#include <string>

#include "cliplab/geometry.hpp"
#include "cliplab/vector.hpp"

namespace cliplab {

/// Synthetic objective with exact gradient and known constants.
///
/// `L` is the smoothness constant with respect to the bound geometry's
/// primal/dual norm pair. `G` is the constant of the relaxed condition
///   f(y) - f(x) <= <grad f(x), y - x> + G |y - x| + L/2 |y - x|^2
/// and is 0 for smooth instances.
struct Problem {
  std::string name;
  Geometry geometry;
  std::function<double(std::span<const double>)> value;
  std::function<Vector(std::span<const double>)> gradient;
  double L = 0.0;
  double f_star = 0.0;
  std::optional<Vector> x_star;
  double G = 0.0;
  bool convex = true;

  std::size_t dim() const { return geometry.dim(); }
  double gap(std::span<const double> x) const { return value(x) - f_star; }
};

/// f(x) = 0.5 sum diag_i (x_i - shift_i)^2. Binds to `geometry` when given
/// (Euclidean or ball), otherwise to the unconstrained Euclidean geometry.
/// With a ball geometry the shift must lie inside the ball.
Problem make_quadratic(std::size_t d, const Vector& diag, const Vector& shift,
                       std::optional<Geometry> geometry = std::nullopt);

/// f(x) = 0.5 |x - target|_2^2 on the probability simplex, L = 1 w.r.t. l1.
Problem make_simplex_quadratic(std::size_t d, const Vector& target);

/// f(x) = sum x_i^2 / (1 + x_i^2). Nonconvex, f* = 0, L = 2.
Problem make_nonconvex_ratio(std::size_t d);

/// f(x) = 0.5 |x|^2 + weight |x|_2 with the subgradient 0 at the origin.
/// Reports L = 1 and G = 2 * weight (the tight constant of the relaxed
/// smoothness condition for a norm term of this weight).
Problem make_nonsmooth_quadratic(std::size_t d, double weight);

}  // namespace cliplab
