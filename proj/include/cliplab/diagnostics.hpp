#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cliplab/algorithms.hpp"
#include "cliplab/noise.hpp"
#include "cliplab/problems.hpp"
#include "cliplab/rng.hpp"

namespace cliplab {

/// Generic per-check outcome, serialized as one CSV/JSON row.
struct CheckReport {
  std::string name;
  std::size_t steps = 0;
  std::size_t violations = 0;
  /// Largest (lhs - rhs) seen; negative when every check had slack.
  double max_margin = -std::numeric_limits<double>::infinity();
  double std_error = 0.0;
  bool applicable = true;
  std::string note;

  bool passed() const { return violations == 0; }
  void record(double lhs_minus_rhs, double tol);
};

// MGF bound for bounded zero-mean variables ----------------------------------

/// Discrete zero-mean law.
struct DiscreteLaw {
  std::vector<double> values;
  std::vector<double> probs;

  static DiscreteLaw rademacher(double R);
  /// P(X = a) = pi, P(X = -b) = 1 - pi with pi a = (1 - pi) b.
  static DiscreteLaw two_point(double a, double b);
  double mean() const;
  double second_moment() const;
  double mgf(double lambda) const;
  double max_abs() const;
};

struct MgfPoint {
  double lambda = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double std_error = 0.0;
  bool skipped = false;
  bool holds = false;
};

struct MgfReport {
  std::vector<MgfPoint> points;
  bool all_hold() const;
};

/// Exact check of E exp(lambda X) <= exp(3/4 lambda^2 E X^2) on the grid.
/// Points with lambda > 1/R are skipped.
MgfReport check_lemma2_mgf(double R, const std::vector<double>& lambda_grid,
                           const DiscreteLaw& law);

/// Monte Carlo version for continuous laws bounded by R, with 5-stderr slack.
MgfReport check_lemma2_mgf_mc(double R, const std::vector<double>& lambda_grid,
                              const std::function<double(Rng&)>& sampler,
                              std::size_t n, Rng& rng);

/// n equally spaced points in [0, 1/R].
std::vector<double> lambda_grid(double R, std::size_t n);

// Clipped-gradient bias and variance -----------------------------------------

struct ClipBoundsReport {
  CheckReport theta_u_bound;
  double bias = 0.0;
  double bias_stderr = 0.0;
  double bias_bound = 0.0;
  bool bias_applicable = false;
  bool bias_holds = true;
  double second_moment = 0.0;
  double second_moment_stderr = 0.0;
  double second_moment_bound = 0.0;
  bool second_moment_holds = true;

  bool passed() const {
    return theta_u_bound.passed() && bias_holds && second_moment_holds;
  }
};

/// Draws m clipped samples at x. Checks |theta_u|_* <= 2 lambda on every
/// draw and, when |grad f(x)|_* <= lambda/2, the bias and second-moment
/// bounds 4 sigma^p lambda^(1-p) and 40 sigma^p lambda^(2-p) with 5-stderr
/// slack.
ClipBoundsReport check_lemma1_bounds(Oracle& oracle, const Vector& x, double lambda,
                                 std::size_t m);

// Pathwise per-step inequalities ----------------------------------------------

/// rhs - lhs of the per-step mirror-descent inequality (negative = violated).
double pathwise_smd_slack(const Problem& problem, const StepContext& ctx);
double pathwise_asmd_slack(const Problem& problem, const StepContext& ctx);
double pathwise_sgd_slack(const Problem& problem, const StepContext& ctx);

/// Observer accumulating the per-step inequality matching the algorithm.
class PathwiseMonitor {
 public:
  explicit PathwiseMonitor(const Problem& problem, double tol = 1e-8);
  StepObserver observer();
  const CheckReport& report() const { return report_; }

 private:
  const Problem& problem_;
  double tol_;
  CheckReport report_;
};

// Supermartingale trace -------------------------------------------------------

struct TraceRow {
  std::size_t t = 0;
  double z = 0.0;
  double Z = 0.0;
  double S = 0.0;
  double theta_u_sq = 0.0;
  double theta_b_norm = 0.0;
  double mc_stderr = 0.0;
};

struct MartingaleTrace {
  std::vector<TraceRow> rows;
  double Q = 0.0;
  double P = 0.0;
  double threshold = 0.0;
  double max_S = -std::numeric_limits<double>::infinity();
  bool crossed = false;
  bool z_nonincreasing = true;
  /// Set when some step's conditional-mean stderr exceeded 10% of lambda.
  bool unstable_mc = false;
};

/// Runs Clipped-SMD and builds Z_t / S_t with conditional moments estimated
/// from m resamples drawn on an independent stream of the oracle.
MartingaleTrace martingale_trace_smd(Oracle& oracle, const StepSource& steps,
                                     std::size_t T, const Vector& x1, double Q,
                                     double delta, std::size_t m);

/// Clipped-SGD counterpart with P_t = C1 / (lambda eta sqrt(2L)) and
/// Q_t = C1^2 sqrt(A) / (2 L eta^2 lambda^2); needs a theorem schedule.
MartingaleTrace martingale_trace_sgd(Oracle& oracle, const Schedule& schedule,
                                     std::size_t T, const Vector& x1,
                                     double delta, std::size_t m);

// Anytime series -------------------------------------------------------------

/// sum_{t=1}^{upper} 1 / (2 t (1 + ln t)^2).
double check_fact1(std::size_t upper);

/// Stream index used for diagnostic resampling, distinct from the run stream.
constexpr std::uint64_t kResampleStream = 0x7e57;

}  // namespace cliplab
