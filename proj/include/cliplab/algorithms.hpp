#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cliplab/noise.hpp"
#include "cliplab/problems.hpp"
#include "cliplab/schedules.hpp"

namespace cliplab {

enum class Algorithm { Smd, Asmd, Sgd, VanillaSgd };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

/// Source of (eta_t, lambda_t). Wraps a theorem schedule or a fixed rule.
struct StepSource {
  std::string name;
  std::function<StepParams(std::size_t)> params;
  /// Called with (t, |x_t - x_1|) before params(t); may be empty.
  std::function<void(std::size_t, double)> observe;
  bool theorem = true;
};

/// Takes ownership of a copy of the schedule (its trajectory state is reset).
StepSource from_schedule(Schedule schedule);

/// Constant eta and lambda; lambda = +inf disables clipping. Off-theorem.
StepSource constant_steps(double eta,
                          double lambda = std::numeric_limits<double>::infinity());

struct StepRow {
  std::size_t t = 0;
  double eta = 0.0;
  double lambda = 0.0;
  bool clipped = false;
  double raw_grad_norm = 0.0;
  double metric = 0.0;
};

/// Everything a per-step diagnostic needs. Spans are valid only during the
/// callback. For SMD and SGD, y/z spans are empty.
struct StepContext {
  Algorithm algorithm;
  std::size_t t;
  StepParams params;
  std::span<const double> x;
  std::span<const double> grad;
  std::span<const double> clipped;
  std::span<const double> x_next;
  std::span<const double> y;
  std::span<const double> z;
  std::span<const double> y_next;
  std::span<const double> z_next;
};

using StepObserver = std::function<void(const StepContext&)>;

struct RunOptions {
  bool keep_rows = true;
  StepObserver observer;
};

/// Per-run result. `summary` is the theorem metric:
///   SMD  (1/T) sum_{t=2}^{T+1} Delta_t
///   ASMD f(y_{T+1}) - f*
///   SGD  (1/T) sum_{t=1}^{T} |grad f(x_t)|^2
struct RunRecord {
  Algorithm algorithm = Algorithm::Smd;
  std::uint64_t seed = 0;
  std::size_t T = 0;
  std::size_t steps = 0;
  std::vector<StepRow> rows;
  double summary = 0.0;
  double final_gap = 0.0;
  Vector final_iterate;
  std::size_t clipped_steps = 0;
  bool diverged = false;
  double wall_seconds = 0.0;

  double clip_fraction() const {
    return steps == 0 ? 0.0 : static_cast<double>(clipped_steps) / static_cast<double>(steps);
  }
};

RunRecord run_smd(Oracle& oracle, const StepSource& steps, std::size_t T,
                  const Vector& x1, const RunOptions& options = {});
RunRecord run_asmd(Oracle& oracle, const StepSource& steps, std::size_t T,
                   const Vector& y1, const RunOptions& options = {});
RunRecord run_sgd(Oracle& oracle, const StepSource& steps, std::size_t T,
                  const Vector& x1, const RunOptions& options = {});

/// Unclipped SGD with constant step. Stops early with `diverged` set once an
/// iterate is non-finite or has a coordinate above 1e12 in magnitude.
RunRecord run_vanilla_sgd(Oracle& oracle, double eta, std::size_t T,
                          const Vector& x1, const RunOptions& options = {});

/// Schedule overloads; they check that the schedule mode fits the method.
RunRecord run_smd(Oracle& oracle, const Schedule& schedule, std::size_t T,
                  const Vector& x1, const RunOptions& options = {});
RunRecord run_asmd(Oracle& oracle, const Schedule& schedule, std::size_t T,
                   const Vector& y1, const RunOptions& options = {});
RunRecord run_sgd(Oracle& oracle, const Schedule& schedule, std::size_t T,
                  const Vector& x1, const RunOptions& options = {});

constexpr double kDivergenceThreshold = 1e12;

}  // namespace cliplab
