#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cliplab {

enum class ScheduleMode {
  SmdKnownT,
  SmdAnytime,
  SmdParamFree,
  AsmdKnownT,
  AsmdAnytime,
  SgdKnownT,
  SgdAnytime,
};

std::string to_string(ScheduleMode mode);
ScheduleMode parse_schedule_mode(const std::string& name);

bool is_smd(ScheduleMode mode);
bool is_asmd(ScheduleMode mode);
bool is_sgd(ScheduleMode mode);
bool needs_horizon(ScheduleMode mode);

struct ScheduleInputs {
  double p = 2.0;
  double sigma = 0.0;
  double L = 1.0;
  double delta = 0.1;
  double R1 = 1.0;
  double R0 = 0.0;
  double mu = 0.0;
  double g0_norm = 0.0;
  std::optional<std::int64_t> T;
  double c1 = 1.0;
  double c2 = 1.0;
  double grad1 = 0.0;
  double Delta1 = 1.0;
  /// Replaces the accelerated constant c (off-theorem, for visibility).
  std::optional<double> c_override;
  /// Multiplies every emitted step size. 1 is the theorem; anything else is a
  /// deliberately corrupted schedule.
  double eta_scale = 1.0;

  double gamma() const;
};

struct StepParams {
  double eta = 0.0;
  double lambda = 0.0;
  double alpha = 1.0;
};

/// Constants of the proposition each schedule is proved through.
struct PropositionConstants {
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
  double A = 0.0;
};

/// Step-size / clipping-level generator. The parameter-free mode depends on
/// the trajectory: call observe(t, |x_t - x_1|) for t = 1, 2, ... before
/// asking for params(t).
class Schedule {
 public:
  Schedule(ScheduleMode mode, ScheduleInputs inputs);

  ScheduleMode mode() const { return mode_; }
  const ScheduleInputs& inputs() const { return in_; }
  double gamma() const { return gamma_; }

  StepParams params(std::size_t t) const;

  void observe(std::size_t t, double distance_from_x1);
  std::size_t observed() const { return max_dist_.size(); }
  double running_max_distance() const;
  void reset();

  /// Accelerated constant c (or c_t for the anytime mode).
  double accel_c(std::size_t t) const;

  PropositionConstants constants(std::size_t horizon) const;

 private:
  double lambda_smd_param_free(std::size_t t) const;

  ScheduleMode mode_;
  ScheduleInputs in_;
  double gamma_;
  std::vector<double> max_dist_;
};

Schedule smd_known_T(const ScheduleInputs& in);
Schedule smd_anytime(const ScheduleInputs& in);
Schedule smd_param_free(const ScheduleInputs& in);
Schedule asmd_known_T(const ScheduleInputs& in);
Schedule asmd_anytime(const ScheduleInputs& in);
Schedule sgd_known_T(const ScheduleInputs& in);
Schedule sgd_anytime(const ScheduleInputs& in);

/// 2 t (1 + ln t)^2.
double anytime_factor(std::size_t t);

struct ConditionResult {
  std::string name;
  bool passed = false;
  bool vacuous = false;
  double lhs = 0.0;
  double rhs = 0.0;
  /// rhs - lhs, positive when satisfied.
  double margin = 0.0;
};

struct ConditionReport {
  std::vector<ConditionResult> conditions;
  bool all_passed() const;
};

/// Numerically checks the proposition conditions behind the schedule's
/// theorem over t = 1..horizon, plus the step-size caps.
ConditionReport verify_proposition_conditions(const Schedule& schedule,
                                              std::size_t horizon);

/// The explicit high-probability bound of the schedule's theorem at
/// horizon T, evaluated from the same inputs the schedule uses.
double theorem_bound(const Schedule& schedule, std::size_t T);

/// Theoretical log-log exponent of the theorem metric in T. For the
/// accelerated method this is -2 without noise and (1-p)/p otherwise.
double theoretical_exponent(ScheduleMode mode, double p, double sigma);

}  // namespace cliplab
