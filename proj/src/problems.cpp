#include "cliplab/problems.hpp"

#include <algorithm>
#include <cmath>

namespace cliplab {

Problem make_quadratic(std::size_t d, const Vector& diag, const Vector& shift,
                       std::optional<Geometry> geometry) {
  if (d == 0) throw DomainError("quadratic: dimension must be positive");
  if (diag.size() != d || shift.size() != d) {
    throw DomainError("quadratic: dimension mismatch");
  }
  for (double v : diag) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError("quadratic: diag entries must be positive");
    }
  }
  if (!all_finite(shift)) throw DomainError("quadratic: non-finite shift");

  Geometry geom = geometry.value_or(Geometry::euclidean(d));
  if (geom.dim() != d) throw DomainError("quadratic: geometry dimension mismatch");
  if (geom.kind() == GeometryKind::SimplexEntropy) {
    throw DomainError("quadratic: use make_simplex_quadratic for the simplex");
  }
  if (!geom.contains(shift)) {
    throw DomainError("quadratic: minimizer must lie inside the domain");
  }

  Problem p{.name = "quadratic", .geometry = geom};
  p.value = [diag, shift](std::span<const double> x) {
    require_same_size(x, shift, "quadratic");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = x[i] - shift[i];
      s += diag[i] * r * r;
    }
    return 0.5 * s;
  };
  p.gradient = [diag, shift](std::span<const double> x) {
    require_same_size(x, shift, "quadratic");
    Vector g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = diag[i] * (x[i] - shift[i]);
    return g;
  };
  p.L = *std::max_element(diag.begin(), diag.end());
  p.f_star = 0.0;
  p.x_star = shift;
  return p;
}

Problem make_simplex_quadratic(std::size_t d, const Vector& target) {
  if (d == 0) throw DomainError("simplex_quadratic: dimension must be positive");
  if (target.size() != d) throw DomainError("simplex_quadratic: dimension mismatch");
  double total = 0.0;
  for (double v : target) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError("simplex_quadratic: target must be strictly positive");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw DomainError("simplex_quadratic: target must lie on the simplex");
  }

  Problem p{.name = "simplex_quadratic", .geometry = Geometry::simplex(d)};
  p.value = [target](std::span<const double> x) {
    require_same_size(x, target, "simplex_quadratic");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = x[i] - target[i];
      s += r * r;
    }
    return 0.5 * s;
  };
  p.gradient = [target](std::span<const double> x) { return sub(x, target); };
  p.L = 1.0;
  p.f_star = 0.0;
  p.x_star = target;
  return p;
}

Problem make_nonconvex_ratio(std::size_t d) {
  if (d == 0) throw DomainError("nonconvex_ratio: dimension must be positive");
  Problem p{.name = "nonconvex_ratio", .geometry = Geometry::euclidean(d)};
  p.value = [d](std::span<const double> x) {
    if (x.size() != d) throw DomainError("nonconvex_ratio: dimension mismatch");
    double s = 0.0;
    for (double u : x) s += u * u / (1.0 + u * u);
    return s;
  };
  p.gradient = [d](std::span<const double> x) {
    if (x.size() != d) throw DomainError("nonconvex_ratio: dimension mismatch");
    Vector g(d);
    for (std::size_t i = 0; i < d; ++i) {
      const double q = 1.0 + x[i] * x[i];
      g[i] = 2.0 * x[i] / (q * q);
    }
    return g;
  };
  p.L = 2.0;
  p.f_star = 0.0;
  p.x_star = Vector(d, 0.0);
  p.convex = false;
  return p;
}

Problem make_nonsmooth_quadratic(std::size_t d, double weight) {
  if (d == 0) throw DomainError("nonsmooth_quadratic: dimension must be positive");
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    throw DomainError("nonsmooth_quadratic: weight must be nonnegative");
  }
  Problem p{.name = "nonsmooth_quadratic", .geometry = Geometry::euclidean(d)};
  p.value = [weight](std::span<const double> x) {
    return 0.5 * squared_norm2(x) + weight * norm2(x);
  };
  p.gradient = [weight](std::span<const double> x) {
    const double n = norm2(x);
    if (n == 0.0) return Vector(x.size(), 0.0);
    return scaled(x, 1.0 + weight / n);
  };
  p.L = 1.0;
  p.f_star = 0.0;
  p.x_star = Vector(d, 0.0);
  p.G = 2.0 * weight;
  return p;
}

}  // namespace cliplab
