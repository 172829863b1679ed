#include "cliplab/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cliplab/vector.hpp"

namespace cliplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string("schedule: ") + what + " must be positive");
  }
}

void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string("schedule: ") + what + " must be nonnegative");
  }
}

/// B = 2 L R1 + L R0 + mu sigma + |g0|_*.
double smd_deterministic_term(const ScheduleInputs& in) {
  return 2.0 * in.L * in.R1 + in.L * in.R0 + in.mu * in.sigma + in.g0_norm;
}

double sgd_lambda(const ScheduleInputs& in, double gamma, double tau) {
  const double p = in.p;
  const double grow = std::pow(tau, 1.0 / (3.0 * p - 2.0));
  double b1 = 0.0, b3 = 0.0;
  if (in.sigma > 0.0) {
    b1 = std::pow(8.0 * gamma / std::sqrt(in.L * in.Delta1), 1.0 / (p - 1.0)) *
         grow * std::pow(in.sigma, p / (p - 1.0));
    b3 = std::pow(32.0, 1.0 / p) * in.sigma * grow;
  }
  const double b2 = 2.0 * std::sqrt(90.0 * in.L * in.Delta1);
  return std::max({b1, b2, b3});
}

double sgd_eta(const ScheduleInputs& in, double gamma, double tau, double lambda) {
  const double p = in.p;
  return std::sqrt(in.Delta1) * std::pow(tau, (1.0 - p) / (3.0 * p - 2.0)) /
         (8.0 * lambda * std::sqrt(in.L) * gamma);
}

ConditionResult make_le(std::string name, double lhs, double rhs,
                        double rel_tol = 1e-12) {
  ConditionResult r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.passed = lhs <= rhs * (1.0 + rel_tol) + 1e-300;
  return r;
}

ConditionResult make_vacuous(std::string name) {
  ConditionResult r;
  r.name = std::move(name);
  r.passed = true;
  r.vacuous = true;
  r.rhs = kInf;
  r.margin = kInf;
  return r;
}

}  // namespace

std::string to_string(ScheduleMode mode) {
  switch (mode) {
    case ScheduleMode::SmdKnownT:
      return "smd_known_T";
    case ScheduleMode::SmdAnytime:
      return "smd_anytime";
    case ScheduleMode::SmdParamFree:
      return "smd_param_free";
    case ScheduleMode::AsmdKnownT:
      return "asmd_known_T";
    case ScheduleMode::AsmdAnytime:
      return "asmd_anytime";
    case ScheduleMode::SgdKnownT:
      return "sgd_known_T";
    case ScheduleMode::SgdAnytime:
      return "sgd_anytime";
  }
  return "unknown";
}

ScheduleMode parse_schedule_mode(const std::string& name) {
  for (auto m : {ScheduleMode::SmdKnownT, ScheduleMode::SmdAnytime,
                 ScheduleMode::SmdParamFree, ScheduleMode::AsmdKnownT,
                 ScheduleMode::AsmdAnytime, ScheduleMode::SgdKnownT,
                 ScheduleMode::SgdAnytime}) {
    if (to_string(m) == name) return m;
  }
  throw DomainError("unknown schedule mode '" + name + "'");
}

bool is_smd(ScheduleMode m) {
  return m == ScheduleMode::SmdKnownT || m == ScheduleMode::SmdAnytime ||
         m == ScheduleMode::SmdParamFree;
}

bool is_asmd(ScheduleMode m) {
  return m == ScheduleMode::AsmdKnownT || m == ScheduleMode::AsmdAnytime;
}

bool is_sgd(ScheduleMode m) {
  return m == ScheduleMode::SgdKnownT || m == ScheduleMode::SgdAnytime;
}

bool needs_horizon(ScheduleMode m) {
  return m == ScheduleMode::SmdKnownT || m == ScheduleMode::AsmdKnownT ||
         m == ScheduleMode::SgdKnownT;
}

double ScheduleInputs::gamma() const {
  return std::max(std::log(1.0 / delta), 1.0);
}

double anytime_factor(std::size_t t) {
  const double tt = static_cast<double>(t);
  const double l = 1.0 + std::log(tt);
  return 2.0 * tt * l * l;
}

Schedule::Schedule(ScheduleMode mode, ScheduleInputs inputs)
    : mode_(mode), in_(std::move(inputs)) {
  if (!(in_.p > 1.0 && in_.p <= 2.0)) throw DomainError("schedule: p must lie in (1, 2]");
  require_nonnegative(in_.sigma, "sigma");
  require_positive(in_.L, "L");
  if (!(in_.delta > 0.0 && in_.delta < 1.0)) {
    throw DomainError("schedule: delta must lie in (0, 1)");
  }
  require_positive(in_.eta_scale, "eta_scale");
  if (needs_horizon(mode_)) {
    if (!in_.T) throw DomainError("schedule: missing T for " + to_string(mode_));
    if (*in_.T < 1) throw DomainError("schedule: T must be at least 1");
  }
  switch (mode_) {
    case ScheduleMode::SmdKnownT:
    case ScheduleMode::SmdAnytime:
      require_positive(in_.R1, "R1");
      require_nonnegative(in_.R0, "R0");
      require_nonnegative(in_.mu, "mu");
      require_nonnegative(in_.g0_norm, "g0_norm");
      break;
    case ScheduleMode::SmdParamFree:
      require_positive(in_.c1, "c1");
      require_positive(in_.c2, "c2");
      require_nonnegative(in_.grad1, "grad1");
      break;
    case ScheduleMode::AsmdKnownT:
    case ScheduleMode::AsmdAnytime:
      require_positive(in_.R1, "R1");
      if (in_.c_override) require_positive(*in_.c_override, "c_override");
      break;
    case ScheduleMode::SgdKnownT:
    case ScheduleMode::SgdAnytime:
      require_positive(in_.Delta1, "Delta1");
      break;
  }
  gamma_ = in_.gamma();
}

void Schedule::observe(std::size_t t, double distance_from_x1) {
  if (t != max_dist_.size() + 1) {
    throw DomainError("schedule: state updated out of order (expected t = " +
                      std::to_string(max_dist_.size() + 1) + ", got " +
                      std::to_string(t) + ")");
  }
  require_nonnegative(distance_from_x1, "distance");
  const double prev = max_dist_.empty() ? 0.0 : max_dist_.back();
  max_dist_.push_back(std::max(prev, distance_from_x1));
}

void Schedule::reset() { max_dist_.clear(); }

double Schedule::running_max_distance() const {
  return max_dist_.empty() ? 0.0 : max_dist_.back();
}

double Schedule::lambda_smd_param_free(std::size_t t) const {
  if (t > max_dist_.size()) {
    throw DomainError("schedule: parameter-free step " + std::to_string(t) +
                      " requested before the iterate was observed");
  }
  const double p = in_.p;
  const double b1 = std::pow(26.0 * anytime_factor(t) * in_.c2, 1.0 / p);
  const double b2 = 2.0 * (in_.L * max_dist_[t - 1] + in_.grad1);
  const double b3 = in_.L * in_.c1 / 6.0;
  return std::max({b1, b2, b3});
}

double Schedule::accel_c(std::size_t t) const {
  if (in_.c_override) return *in_.c_override;
  const double p = in_.p;
  double n = 0.0;
  double horizon = 0.0;
  if (mode_ == ScheduleMode::AsmdKnownT) {
    horizon = static_cast<double>(*in_.T);
    n = 26.0 * horizon;
  } else {
    horizon = static_cast<double>(t);
    n = 26.0 * anytime_factor(t);
  }
  const double noise = 4.0 * (horizon + 1.0) * std::pow(n / gamma_, 1.0 / p) *
                       in_.sigma / (gamma_ * in_.L * in_.R1);
  return std::max(1e4, noise);
}

StepParams Schedule::params(std::size_t t) const {
  if (t < 1) throw DomainError("schedule: t starts at 1");
  const double p = in_.p;
  StepParams s;
  switch (mode_) {
    case ScheduleMode::SmdKnownT:
    case ScheduleMode::SmdAnytime: {
      const double n = mode_ == ScheduleMode::SmdKnownT
                           ? 26.0 * static_cast<double>(*in_.T)
                           : 26.0 * anytime_factor(t);
      const double noise = std::pow(n / gamma_, 1.0 / p) * in_.sigma;
      s.lambda = std::max(noise, 2.0 * smd_deterministic_term(in_));
      s.eta = in_.R1 / (24.0 * s.lambda * gamma_);
      break;
    }
    case ScheduleMode::SmdParamFree:
      s.lambda = lambda_smd_param_free(t);
      s.eta = in_.c1 / (24.0 * s.lambda);
      break;
    case ScheduleMode::AsmdKnownT:
    case ScheduleMode::AsmdAnytime: {
      const double c = accel_c(t);
      s.alpha = 2.0 / (static_cast<double>(t) + 1.0);
      s.lambda = c * in_.R1 * gamma_ * in_.L * s.alpha / 8.0;
      s.eta = 1.0 / (3.0 * c * gamma_ * gamma_ * in_.L * s.alpha);
      break;
    }
    case ScheduleMode::SgdKnownT:
    case ScheduleMode::SgdAnytime: {
      const double tau = mode_ == ScheduleMode::SgdKnownT
                             ? static_cast<double>(*in_.T)
                             : anytime_factor(t);
      s.lambda = sgd_lambda(in_, gamma_, tau);
      s.eta = sgd_eta(in_, gamma_, tau, s.lambda);
      break;
    }
  }
  s.eta *= in_.eta_scale;
  return s;
}

PropositionConstants Schedule::constants(std::size_t horizon) const {
  const double sp = std::pow(in_.sigma, in_.p);
  const double g = gamma_;
  PropositionConstants c;
  switch (mode_) {
    case ScheduleMode::SmdKnownT:
    case ScheduleMode::AsmdKnownT:
      c.C1 = in_.R1 / (24.0 * g);
      c.C2 = sp > 0.0 ? g / (26.0 * sp) : kInf;
      c.C3 = sp > 0.0 ? g / (26.0 * static_cast<double>(*in_.T) * sp) : kInf;
      c.A = 3.0 * g;
      break;
    case ScheduleMode::SmdAnytime:
    case ScheduleMode::AsmdAnytime:
      c.C1 = in_.R1 / (24.0 * g);
      c.C2 = sp > 0.0 ? g / (26.0 * sp) : kInf;
      c.C3 = sp > 0.0 ? g / (52.0 * sp) : kInf;
      c.A = 3.0 * g;
      break;
    case ScheduleMode::SmdParamFree:
      c.C1 = in_.c1 / 24.0;
      c.C2 = 1.0 / (26.0 * in_.c2);
      c.C3 = 1.0 / (52.0 * in_.c2);
      c.A = g + 2.0 * sp / in_.c2;
      break;
    case ScheduleMode::SgdKnownT:
    case ScheduleMode::SgdAnytime:
      c.C1 = std::sqrt(in_.Delta1) / (4.0 * std::sqrt(2.0) * g);
      c.C2 = sp > 0.0 ? 1.0 / sp : kInf;
      c.C3 = sp > 0.0 ? in_.Delta1 / (2048.0 * sp * g) : kInf;
      c.A = 256.0 * g * g;
      break;
  }
  (void)horizon;
  return c;
}

bool ConditionReport::all_passed() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const ConditionResult& c) { return c.passed; });
}

ConditionReport verify_proposition_conditions(const Schedule& schedule,
                                              std::size_t horizon) {
  if (horizon < 1) throw DomainError("verify: horizon must be at least 1");
  const ScheduleMode mode = schedule.mode();
  const ScheduleInputs& in = schedule.inputs();
  const double p = in.p;
  const double sp = std::pow(in.sigma, p);
  const bool noisy = sp > 0.0;
  const PropositionConstants k = schedule.constants(horizon);
  const double log_inv_delta = std::log(1.0 / in.delta);

  // The parameter-free schedule needs a trajectory; extend the observed one
  // by assuming no further movement.
  Schedule sched = schedule;
  if (mode == ScheduleMode::SmdParamFree) {
    const double dist = sched.running_max_distance();
    while (sched.observed() < horizon) sched.observe(sched.observed() + 1, dist);
  }

  ConditionReport report;
  const bool sigma_free_c2 = mode == ScheduleMode::SmdParamFree;

  if (!is_sgd(mode)) {
    double worst_rel = 0.0, worst_prod = 0.0;
    double sum_inv = 0.0, max_inv = 0.0;
    double max_eta_cap = 0.0;
    double worst_ratio_gap = -kInf;
    StepParams prev;
    for (std::size_t t = 1; t <= horizon; ++t) {
      const StepParams s = sched.params(t);
      const double prod = s.eta * s.lambda;
      const double rel = std::abs(prod - k.C1) / k.C1;
      if (rel >= worst_rel) {
        worst_rel = rel;
        worst_prod = prod;
      }
      const double inv = std::pow(s.lambda, -p);
      sum_inv += inv;
      max_inv = std::max(max_inv, inv);
      if (is_smd(mode)) {
        max_eta_cap = std::max(max_eta_cap, 4.0 * in.L * s.eta);
      } else {
        max_eta_cap = std::max(max_eta_cap, 2.0 * in.L * s.alpha * s.eta);
        if (t > 1) {
          const double lhs = s.eta * (1.0 - s.alpha) / s.alpha;
          const double rhs = prev.eta / prev.alpha;
          worst_ratio_gap = std::max(worst_ratio_gap, (lhs - rhs) / rhs);
        }
      }
      prev = s;
    }
    ConditionResult c1;
    c1.name = "eta_lambda_equals_C1";
    c1.lhs = worst_prod;
    c1.rhs = k.C1;
    c1.margin = -worst_rel;
    c1.passed = worst_rel <= 1e-12;
    report.conditions.push_back(c1);

    if (noisy || sigma_free_c2) {
      report.conditions.push_back(make_le("sum_inv_lambda_p_le_C2", sum_inv, k.C2));
      report.conditions.push_back(make_le("inv_lambda_p_le_C3", max_inv, k.C3));
    } else {
      report.conditions.push_back(make_vacuous("sum_inv_lambda_p_le_C2"));
      report.conditions.push_back(make_vacuous("inv_lambda_p_le_C3"));
    }

    double needed = log_inv_delta;
    if (noisy) {
      needed += 26.0 * sp * k.C2 + 2.0 * sp * sp * k.C2 * k.C3 / k.A;
    }
    report.conditions.push_back(make_le("A_condition", std::max(needed, 1.0), k.A));

    if (is_smd(mode)) {
      report.conditions.push_back(make_le("eta_le_1_over_4L", max_eta_cap, 1.0));
    } else {
      report.conditions.push_back(make_le("eta_le_1_over_2L_alpha", max_eta_cap, 1.0));
      ConditionResult r;
      r.name = "eta_over_alpha_monotone";
      r.lhs = horizon > 1 ? worst_ratio_gap : 0.0;
      r.rhs = 0.0;
      r.margin = -r.lhs;
      r.passed = r.lhs <= 1e-12;
      report.conditions.push_back(r);
    }
    return report;
  }

  // SGD
  double max_c1 = 0.0, max_c2 = 0.0, sum_c3 = 0.0, max_eta_l = 0.0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const StepParams s = sched.params(t);
    max_c1 = std::max(max_c1, s.eta * s.lambda * std::sqrt(2.0 * in.L));
    const double inv = std::pow(s.lambda, -p);
    max_c2 = std::max(max_c2, inv / (in.L * s.eta));
    sum_c3 += in.L * inv * s.lambda * s.lambda * s.eta * s.eta;
    max_eta_l = std::max(max_eta_l, in.L * s.eta);
  }
  report.conditions.push_back(make_le("eta_lambda_sqrt2L_le_C1", max_c1, k.C1));
  if (noisy) {
    report.conditions.push_back(make_le("inv_lambda_p_over_L_eta_le_C2", max_c2, k.C2));
    report.conditions.push_back(make_le("sum_L_lambda_eta_sq_le_C3", sum_c3, k.C3));
  } else {
    report.conditions.push_back(make_vacuous("inv_lambda_p_over_L_eta_le_C2"));
    report.conditions.push_back(make_vacuous("sum_L_lambda_eta_sq_le_C3"));
  }
  double needed = 64.0 * log_inv_delta * log_inv_delta;
  if (noisy) {
    const double c1sq = k.C1 * k.C1;
    const double inner = log_inv_delta + 60.0 * sp * k.C3 / c1sq;
    needed = 64.0 * inner * inner +
             (48.0 * sp * sp * k.C2 * k.C3 + 140.0 * sp * k.C3) / c1sq;
  }
  report.conditions.push_back(make_le("A_condition", std::max(needed, 1.0), k.A));
  report.conditions.push_back(make_le("eta_le_1_over_L", max_eta_l, 1.0));
  return report;
}

double theorem_bound(const Schedule& schedule, std::size_t T) {
  if (T < 1) throw DomainError("theorem_bound: T must be at least 1");
  const ScheduleInputs& in = schedule.inputs();
  const double p = in.p;
  const double g = schedule.gamma();
  const double TT = static_cast<double>(T);
  const double logT = 1.0 + std::log(TT);
  switch (schedule.mode()) {
    case ScheduleMode::SmdKnownT:
    case ScheduleMode::SmdAnytime: {
      double noise = std::pow(26.0, 1.0 / p);
      if (schedule.mode() == ScheduleMode::SmdAnytime) {
        noise = std::pow(52.0, 1.0 / p) * std::pow(logT, 2.0 / p);
      }
      noise *= std::pow(TT, (1.0 - p) / p) * in.sigma * std::pow(g, (p - 1.0) / p);
      const double det = 2.0 * smd_deterministic_term(in) * g / TT;
      return 48.0 * in.R1 * std::max(noise, det);
    }
    case ScheduleMode::SmdParamFree: {
      const double sp = std::pow(in.sigma, p);
      const double a = g + 2.0 * sp / in.c2;
      const double lead = in.R1 + in.c1 / 3.0 * a;
      const double b1 = std::pow(52.0 * TT * logT * logT * in.c2, 1.0 / p);
      const double b2 = 4.0 * in.R1 * in.L + 2.0 * in.c1 / 3.0 * in.L * a + 2.0 * in.grad1;
      const double b3 = in.L * in.c1 / 6.0;
      return 8.0 / (TT * in.c1) * lead * lead * std::max({b1, b2, b3});
    }
    case ScheduleMode::AsmdKnownT:
    case ScheduleMode::AsmdAnytime: {
      // 2 R1^2 alpha_T / eta_T = 6 R1^2 c gamma^2 L alpha_T^2
      const double c = schedule.accel_c(T);
      const double alpha = 2.0 / (TT + 1.0);
      return 6.0 * in.R1 * in.R1 * c * g * g * in.L * alpha * alpha;
    }
    case ScheduleMode::SgdKnownT: {
      const StepParams s = schedule.params(T);
      return 90.0 * in.Delta1 / (s.eta / in.eta_scale * TT);
    }
    case ScheduleMode::SgdAnytime: {
      const double q = 3.0 * p - 2.0;
      const double base = 2.0 * logT * logT;
      double b1 = 0.0, b3 = 0.0;
      if (in.sigma > 0.0) {
        b1 = std::pow(8.0 * g / std::sqrt(in.L * in.Delta1), 1.0 / (p - 1.0)) *
             std::pow(base, p / q) * std::pow(in.sigma, p / (p - 1.0)) *
             std::pow(TT, (2.0 - 2.0 * p) / q);
        b3 = std::pow(32.0, 1.0 / p) * in.sigma * std::pow(base, p / q) *
             std::pow(TT, (2.0 - 2.0 * p) / q);
      }
      const double b2 = 2.0 * std::sqrt(90.0 * in.L * in.Delta1) *
                        std::pow(base, (p - 1.0) / q) * std::pow(TT, (1.0 - 2.0 * p) / q);
      return 720.0 * std::sqrt(in.Delta1 * in.L) * g * std::max({b1, b2, b3});
    }
  }
  return kInf;
}

double theoretical_exponent(ScheduleMode mode, double p, double sigma) {
  if (is_sgd(mode)) return (2.0 - 2.0 * p) / (3.0 * p - 2.0);
  if (is_asmd(mode) && sigma == 0.0) return -2.0;
  return (1.0 - p) / p;
}

Schedule smd_known_T(const ScheduleInputs& in) { return {ScheduleMode::SmdKnownT, in}; }
Schedule smd_anytime(const ScheduleInputs& in) { return {ScheduleMode::SmdAnytime, in}; }
Schedule smd_param_free(const ScheduleInputs& in) { return {ScheduleMode::SmdParamFree, in}; }
Schedule asmd_known_T(const ScheduleInputs& in) { return {ScheduleMode::AsmdKnownT, in}; }
Schedule asmd_anytime(const ScheduleInputs& in) { return {ScheduleMode::AsmdAnytime, in}; }
Schedule sgd_known_T(const ScheduleInputs& in) { return {ScheduleMode::SgdKnownT, in}; }
Schedule sgd_anytime(const ScheduleInputs& in) { return {ScheduleMode::SgdAnytime, in}; }

}  // namespace cliplab
