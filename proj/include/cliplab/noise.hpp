#pragma once

#include <cstdint>
#include <string>

#include "cliplab/problems.hpp"
#include "cliplab/rng.hpp"
#include "cliplab/vector.hpp"

namespace cliplab {

enum class NoiseKind { None, TwoPoint, RadialPareto };

std::string to_string(NoiseKind kind);

/// Zero-mean perturbation law with E |xi|_*^p = sigma^p.
///
/// TwoPoint: with probability q, xi = +-M e_i (uniform coordinate, uniform
/// sign) and M = sigma q^(-1/p); otherwise xi = 0. Every norm of +-M e_i is M,
/// so the calibration holds in any dual norm.
///
/// RadialPareto: xi = r u, u uniform on the l2 unit sphere and r Pareto with
/// shape a and scale s = sigma ((a - p)/a)^(1/p). Only valid for l2 duals.
struct NoiseModel {
  NoiseKind kind = NoiseKind::None;
  double p = 2.0;
  double sigma = 0.0;
  double q = 1.0;
  double tail = 2.0;
  /// M for TwoPoint, s for RadialPareto, 0 otherwise.
  double scale = 0.0;

  bool degenerate() const { return kind == NoiseKind::None || sigma == 0.0; }
};

NoiseModel make_no_noise(double p = 2.0);
NoiseModel make_two_point(double p, double sigma, double q);
NoiseModel make_radial_pareto(double p, double sigma, double tail);

/// Draw order: TwoPoint consumes one uniform for the spike test and, on a
/// spike, one index draw and one sign uniform. RadialPareto consumes one
/// uniform for the radius followed by d normals for the direction.
Vector sample_noise(const NoiseModel& model, std::size_t d, Rng& rng);

struct MomentEstimate {
  double moment = 0.0;
  /// Standard error of the mean, or for heavy-tailed laws the robust spread
  /// (1.4826 * MAD) of the block means.
  double std_error = 0.0;
  bool median_of_means = false;
};

/// Empirical E |xi|^p. Uses the plain mean when |xi|^p has finite variance
/// (TwoPoint), else median-of-means over 50 blocks.
MomentEstimate moment_check(const NoiseModel& model, std::size_t d,
                            std::size_t n, Rng& rng);

/// History-independent unbiased gradient oracle: grad f(x) + xi.
class Oracle {
 public:
  Oracle(Problem problem, NoiseModel noise, std::uint64_t seed);

  const Problem& problem() const { return problem_; }
  const NoiseModel& noise() const { return noise_; }
  std::uint64_t seed() const { return seed_; }

  Vector exact_gradient(std::span<const double> x) const;
  Vector stochastic_grad(std::span<const double> x);

  /// An oracle for the same problem and law with an independent stream.
  Oracle fork(std::uint64_t stream) const;

 private:
  Problem problem_;
  NoiseModel noise_;
  std::uint64_t seed_;
  Rng rng_;
};

}  // namespace cliplab
