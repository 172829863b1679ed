#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cliplab {

/// Dense real vector in problem coordinates.
using Vector = std::vector<double>;

/// Raised when a caller violates a documented precondition.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by iterative routines that fail to reach their tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NormKind { L1, L2, LInf };

std::string to_string(NormKind kind);

void require_same_size(std::span<const double> a, std::span<const double> b,
                       const char* what);
bool all_finite(std::span<const double> v);

double dot(std::span<const double> a, std::span<const double> b);
double norm(NormKind kind, std::span<const double> v);
double norm2(std::span<const double> v);
double squared_norm2(std::span<const double> v);

Vector add(std::span<const double> a, std::span<const double> b);
Vector sub(std::span<const double> a, std::span<const double> b);
Vector scaled(std::span<const double> v, double s);
/// a + s * b
Vector axpy(std::span<const double> a, double s, std::span<const double> b);
/// (1 - w) * a + w * b
Vector lerp(std::span<const double> a, std::span<const double> b, double w);

}  // namespace cliplab
