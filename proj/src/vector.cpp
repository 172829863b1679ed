#include "cliplab/vector.hpp"

#include <algorithm>

namespace cliplab {

std::string to_string(NormKind kind) {
  switch (kind) {
    case NormKind::L1:
      return "l1";
    case NormKind::L2:
      return "l2";
    case NormKind::LInf:
      return "linf";
  }
  return "unknown";
}

void require_same_size(std::span<const double> a, std::span<const double> b,
                       const char* what) {
  if (a.size() != b.size()) {
    throw DomainError(std::string(what) + ": dimension mismatch (" +
                      std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()) + ")");
  }
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double norm2(std::span<const double> v) { return std::sqrt(squared_norm2(v)); }

double norm(NormKind kind, std::span<const double> v) {
  switch (kind) {
    case NormKind::L1: {
      double s = 0.0;
      for (double x : v) s += std::abs(x);
      return s;
    }
    case NormKind::L2:
      return norm2(v);
    case NormKind::LInf: {
      double m = 0.0;
      for (double x : v) m = std::max(m, std::abs(x));
      return m;
    }
  }
  return 0.0;
}

Vector add(std::span<const double> a, std::span<const double> b) {
  require_same_size(a, b, "add");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vector sub(std::span<const double> a, std::span<const double> b) {
  require_same_size(a, b, "sub");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Vector scaled(std::span<const double> v, double s) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = s * v[i];
  return out;
}

Vector axpy(std::span<const double> a, double s, std::span<const double> b) {
  require_same_size(a, b, "axpy");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + s * b[i];
  return out;
}

Vector lerp(std::span<const double> a, std::span<const double> b, double w) {
  require_same_size(a, b, "lerp");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = (1.0 - w) * a[i] + w * b[i];
  }
  return out;
}

}  // namespace cliplab
