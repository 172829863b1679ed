#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cliplab/noise.hpp"
#include "cliplab/vector.hpp"

namespace cliplab {

/// min{1, lambda / |g|_*} g, with factor 1 at g = 0.
Vector clip(std::span<const double> g, double lambda, NormKind dual);

/// Whether clip() would rescale g.
bool clips(std::span<const double> g, double lambda, NormKind dual);

/// Decomposition theta = theta_u + theta_b of a clipped gradient at a fixed x.
/// The conditional mean is estimated from m fresh clipped samples.
struct ThetaEstimate {
  Vector theta;
  Vector theta_u;
  Vector theta_b;
  std::size_t m = 0;
  /// Standard error (l2) of the conditional-mean estimate.
  double mc_stderr = 0.0;
  /// Estimate of E[|theta_u|_*^2 | x] and its standard error.
  double theta_u_sq = 0.0;
  double theta_u_sq_stderr = 0.0;
};

/// Uses `clipped` as the realized sample and draws the m auxiliary samples
/// from `aux`, so a run's trajectory does not depend on the resampling.
ThetaEstimate estimate_theta(std::span<const double> clipped,
                             std::span<const double> x, double lambda,
                             std::size_t m, Oracle& aux);

/// Draws the realized sample and the auxiliary ones from the same oracle.
ThetaEstimate estimate_theta(Oracle& oracle, std::span<const double> x,
                             double lambda, std::size_t m);

/// Geometric median (l2) by Weiszfeld iteration with the Vardi-Zhang
/// correction at data points. Stops when a step moves less than
/// tol * (1 + |y|); throws ConvergenceError after max_iter iterations.
Vector geometric_median(const std::vector<Vector>& points, double tol = 1e-10,
                        std::size_t max_iter = 1000);

struct G0Estimate {
  Vector g0;
  /// |g0 - grad f(x0)|_* / sigma, 0 when sigma = 0.
  double mu = 0.0;
};

/// Geometric median of K block means of m stochastic gradients each.
G0Estimate estimate_g0(Oracle& oracle, std::span<const double> x0,
                       std::size_t blocks, std::size_t per_block);

}  // namespace cliplab
