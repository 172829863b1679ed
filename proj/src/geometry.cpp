#include "cliplab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cliplab {

std::string to_string(GeometryKind kind) {
  switch (kind) {
    case GeometryKind::EuclideanUnconstrained:
      return "euclidean";
    case GeometryKind::EuclideanBall:
      return "ball";
    case GeometryKind::SimplexEntropy:
      return "simplex";
  }
  return "unknown";
}

Geometry Geometry::euclidean(std::size_t dim) {
  if (dim == 0) throw DomainError("geometry: dimension must be positive");
  return Geometry(GeometryKind::EuclideanUnconstrained, dim);
}

Geometry Geometry::ball(double radius, Vector center) {
  if (center.empty()) throw DomainError("geometry: dimension must be positive");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw DomainError("geometry: ball radius must be positive");
  }
  if (!all_finite(center)) throw DomainError("geometry: non-finite center");
  Geometry g(GeometryKind::EuclideanBall, center.size());
  g.radius_ = radius;
  g.center_ = std::move(center);
  return g;
}

Geometry Geometry::simplex(std::size_t dim) {
  if (dim == 0) throw DomainError("geometry: dimension must be positive");
  return Geometry(GeometryKind::SimplexEntropy, dim);
}

NormKind Geometry::primal() const {
  return kind_ == GeometryKind::SimplexEntropy ? NormKind::L1 : NormKind::L2;
}

NormKind Geometry::dual() const {
  return kind_ == GeometryKind::SimplexEntropy ? NormKind::LInf : NormKind::L2;
}

void Geometry::check_dim(std::span<const double> v, const char* what) const {
  if (v.size() != dim_) {
    throw DomainError(std::string(what) + ": dimension mismatch (expected " +
                      std::to_string(dim_) + ", got " +
                      std::to_string(v.size()) + ")");
  }
}

double Geometry::norm(std::span<const double> v) const {
  check_dim(v, "norm");
  return cliplab::norm(primal(), v);
}

double Geometry::dual_norm(std::span<const double> v) const {
  check_dim(v, "dual_norm");
  return cliplab::norm(dual(), v);
}

double Geometry::psi(std::span<const double> x) const {
  check_dim(x, "psi");
  if (kind_ != GeometryKind::SimplexEntropy) return 0.5 * squared_norm2(x);
  double s = 0.0;
  for (double xi : x) {
    if (xi < 0.0) throw DomainError("psi: negative entry for entropy map");
    if (xi > 0.0) s += xi * std::log(xi);
  }
  return s;
}

Vector Geometry::grad_psi(std::span<const double> x) const {
  check_dim(x, "grad_psi");
  if (kind_ != GeometryKind::SimplexEntropy) return Vector(x.begin(), x.end());
  Vector g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) {
      throw DomainError("grad_psi: entropy map is not differentiable on the boundary");
    }
    g[i] = 1.0 + std::log(x[i]);
  }
  return g;
}

double Geometry::bregman(std::span<const double> x,
                         std::span<const double> y) const {
  check_dim(x, "bregman");
  check_dim(y, "bregman");
  if (kind_ != GeometryKind::SimplexEntropy) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - y[i];
      s += d * d;
    }
    return 0.5 * s;
  }
  // sum x log(x/y) - x + y, with 0 log 0 := 0
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0.0 || y[i] < 0.0) {
      throw DomainError("bregman: negative entry for entropy map");
    }
    if (x[i] > 0.0) {
      if (y[i] == 0.0) throw DomainError("bregman: divergence undefined");
      s += x[i] * std::log(x[i] / y[i]);
    }
    s += y[i] - x[i];
  }
  return std::max(s, 0.0);
}

Vector Geometry::mirror_step(std::span<const double> x,
                             std::span<const double> g, double eta) const {
  check_dim(x, "mirror_step");
  check_dim(g, "mirror_step");
  if (!(eta > 0.0)) throw DomainError("mirror_step: eta must be positive");

  switch (kind_) {
    case GeometryKind::EuclideanUnconstrained:
      return axpy(x, -eta, g);
    case GeometryKind::EuclideanBall: {
      Vector u = axpy(x, -eta, g);
      Vector offset = sub(u, center_);
      const double dist = norm2(offset);
      if (dist <= radius_) return u;
      return axpy(center_, radius_ / dist, offset);
    }
    case GeometryKind::SimplexEntropy: {
      Vector logits(x.size());
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0)) {
          throw DomainError("mirror_step: simplex iterate must be strictly interior");
        }
        logits[i] = std::log(x[i]) - eta * g[i];
        top = std::max(top, logits[i]);
      }
      double total = 0.0;
      for (double& v : logits) {
        v = std::exp(v - top);
        total += v;
      }
      for (double& v : logits) v /= total;
      return logits;
    }
  }
  return {};
}

bool Geometry::contains(std::span<const double> x, double tol) const {
  if (x.size() != dim_ || !all_finite(x)) return false;
  switch (kind_) {
    case GeometryKind::EuclideanUnconstrained:
      return true;
    case GeometryKind::EuclideanBall:
      return norm2(sub(x, center_)) <= radius_ * (1.0 + tol) + tol;
    case GeometryKind::SimplexEntropy: {
      double total = 0.0;
      for (double xi : x) {
        if (xi < -tol) return false;
        total += xi;
      }
      return std::abs(total - 1.0) <= tol * static_cast<double>(dim_) + tol;
    }
  }
  return false;
}

}  // namespace cliplab
