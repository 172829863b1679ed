#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "cliplab/vector.hpp"

namespace cliplab {

enum class GeometryKind { EuclideanUnconstrained, EuclideanBall, SimplexEntropy };

std::string to_string(GeometryKind kind);

/// A norm / dual-norm pair together with a 1-strongly convex mirror map and
/// its domain.
///
///   EuclideanUnconstrained: l2 / l2, psi = 0.5 |x|^2, domain R^d
///   EuclideanBall:          l2 / l2, psi = 0.5 |x|^2, domain |x - c| <= r
///   SimplexEntropy:         l1 / linf, psi = sum x_i log x_i, domain the
///                           probability simplex. Iterates are kept strictly
///                           interior; starting points must be interior too.
class Geometry {
 public:
  static Geometry euclidean(std::size_t dim);
  static Geometry ball(double radius, Vector center);
  static Geometry simplex(std::size_t dim);

  GeometryKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  double radius() const { return radius_; }
  const Vector& center() const { return center_; }

  NormKind primal() const;
  NormKind dual() const;

  double norm(std::span<const double> v) const;
  double dual_norm(std::span<const double> v) const;

  double psi(std::span<const double> x) const;
  Vector grad_psi(std::span<const double> x) const;

  /// D_psi(x, y) = psi(x) - psi(y) - <grad psi(y), x - y>.
  double bregman(std::span<const double> x, std::span<const double> y) const;

  /// argmin_u { eta <g, u> + D_psi(u, x) } over the domain, in closed form.
  Vector mirror_step(std::span<const double> x, std::span<const double> g,
                     double eta) const;

  bool contains(std::span<const double> x, double tol = 1e-9) const;

  void check_dim(std::span<const double> v, const char* what) const;

 private:
  Geometry(GeometryKind kind, std::size_t dim) : kind_(kind), dim_(dim) {}

  GeometryKind kind_;
  std::size_t dim_;
  double radius_ = 0.0;
  Vector center_;
};

}  // namespace cliplab
