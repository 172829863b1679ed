#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cliplab/algorithms.hpp"
#include "cliplab/config.hpp"
#include "cliplab/noise.hpp"
#include "cliplab/problems.hpp"
#include "cliplab/schedules.hpp"

namespace cliplab {

/// Everything needed to launch runs of one configured experiment at one
/// horizon. Schedule inputs (R1, R0, Delta1, ...) come from the exact problem
/// constants so theorem bounds and schedules share them.
struct Experiment {
  ExperimentConfig config;
  Problem problem;
  NoiseModel noise;
  Vector x1;
  Vector x0;
  std::size_t T = 0;
  std::optional<Schedule> schedule;
  double vanilla_eta = 0.0;
  double g0_norm = 0.0;
  double mu = 0.0;

  StepSource steps() const;
  bool theorem_conformant() const;
};

Problem build_problem(const ExperimentConfig& config);
NoiseModel build_noise(const ExperimentConfig& config);
Experiment build_experiment(const ExperimentConfig& config, std::size_t T);

struct SeedResult {
  std::uint64_t seed = 0;
  double summary = 0.0;
  double final_gap = 0.0;
  double clip_fraction = 0.0;
  std::size_t steps = 0;
  bool diverged = false;
  std::size_t pathwise_violations = 0;
  double pathwise_max_margin = 0.0;
};

struct TrialSummary {
  std::string digest;
  Algorithm algorithm = Algorithm::Smd;
  std::string schedule;
  double p = 2.0;
  std::size_t T = 0;
  std::size_t N = 0;
  double delta = 0.1;
  std::vector<SeedResult> seeds;
  double median = 0.0;
  double upper_quantile = 0.0;
  /// NaN when the schedule is off-theorem.
  double bound = 0.0;
  std::size_t failures = 0;
  double failure_rate = 0.0;
  double failure_stderr = 0.0;
  double mean_clip_fraction = 0.0;
  std::size_t diverged = 0;
  std::vector<std::string> warnings;
};

/// Linear-interpolation quantile (type 7) of unsorted data.
double quantile(std::vector<double> values, double level);

/// 64-bit FNV-1a of the canonical config text, in hex. experiment.out and
/// experiment.jobs are left out.
std::string config_digest(const ExperimentConfig& config);

/// Runs f(i) for i in [0, n) on `jobs` threads. Work is claimed dynamically
/// but every result slot is indexed, so output does not depend on jobs.
void parallel_for(std::size_t n, std::size_t jobs,
                  const std::function<void(std::size_t)>& f);

/// N seeded runs at horizon T (seed i uses base_seed + i).
TrialSummary run_trials(const ExperimentConfig& config, std::size_t T);
TrialSummary run_trials(const ExperimentConfig& config);

struct RateFit {
  std::vector<double> T;
  std::vector<double> metric;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double theoretical = 0.0;
  double deviation = 0.0;
  std::vector<TrialSummary> trials;
};

/// OLS of log(metric) on log(T). Needs at least 4 positive points.
RateFit fit_power_law(const std::vector<double>& T, const std::vector<double>& metric);

/// run_trials over config.T_grid and fit of the median metric.
RateFit fit_rate(const ExperimentConfig& config);

struct CompareReport {
  std::size_t T = 0;
  std::size_t N = 0;
  double vanilla_eta = 0.0;
  double clipped_median = 0.0;
  double vanilla_median = 0.0;
  double clipped_upper = 0.0;
  double vanilla_upper = 0.0;
  /// clipped / vanilla median final gap (1 when both are 0).
  double ratio = 1.0;
  std::size_t clipped_diverged = 0;
  std::size_t vanilla_diverged = 0;
  std::size_t clipped_wins = 0;
  std::size_t ties = 0;
  std::vector<double> clipped_gaps;
  std::vector<double> vanilla_gaps;
};

/// Paired-seed clipped SGD (configured schedule) vs unclipped SGD.
CompareReport compare_clipped_vanilla(const ExperimentConfig& config);

/// "p15", "p20", "p125" style directory label.
std::string p_label(double p);

}  // namespace cliplab
