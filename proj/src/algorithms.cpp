#include "cliplab/algorithms.hpp"

#include <chrono>
#include <cmath>
#include <memory>

#include "cliplab/clipping.hpp"

namespace cliplab {

namespace {

using Clock = std::chrono::steady_clock;

void check_start(const Problem& problem, const Vector& x1) {
  problem.geometry.check_dim(x1, "start point");
  if (!all_finite(x1)) throw DomainError("start point: non-finite entries");
  if (!problem.geometry.contains(x1)) {
    throw DomainError("start point: outside the domain");
  }
  if (problem.geometry.kind() == GeometryKind::SimplexEntropy) {
    for (double v : x1) {
      if (!(v > 0.0)) throw DomainError("start point: simplex start must be strictly interior");
    }
  }
}

void check_euclidean(const Problem& problem, const char* what) {
  if (problem.geometry.kind() != GeometryKind::EuclideanUnconstrained) {
    throw DomainError(std::string(what) + ": requires the unconstrained l2 geometry");
  }
}

StepParams next_params(const StepSource& steps, std::size_t t, double dist) {
  if (steps.observe) steps.observe(t, dist);
  StepParams s = steps.params(t);
  if (!(s.eta > 0.0) || !(s.lambda > 0.0)) {
    throw std::logic_error("step source emitted a nonpositive eta or lambda");
  }
  return s;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Smd:
      return "smd";
    case Algorithm::Asmd:
      return "asmd";
    case Algorithm::Sgd:
      return "sgd";
    case Algorithm::VanillaSgd:
      return "vanilla-sgd";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  for (auto a : {Algorithm::Smd, Algorithm::Asmd, Algorithm::Sgd, Algorithm::VanillaSgd}) {
    if (to_string(a) == name) return a;
  }
  throw DomainError("unknown algorithm '" + name + "'");
}

StepSource from_schedule(Schedule schedule) {
  schedule.reset();
  auto shared = std::make_shared<Schedule>(std::move(schedule));
  StepSource s;
  s.name = to_string(shared->mode());
  s.params = [shared](std::size_t t) { return shared->params(t); };
  if (shared->mode() == ScheduleMode::SmdParamFree) {
    s.observe = [shared](std::size_t t, double d) { shared->observe(t, d); };
  }
  s.theorem = shared->inputs().eta_scale == 1.0 && !shared->inputs().c_override;
  return s;
}

StepSource constant_steps(double eta, double lambda) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("constant_steps: eta must be positive");
  if (!(lambda > 0.0)) throw DomainError("constant_steps: lambda must be positive");
  StepSource s;
  s.name = "constant";
  s.params = [eta, lambda](std::size_t) { return StepParams{eta, lambda, 1.0}; };
  s.theorem = false;
  return s;
}

RunRecord run_smd(Oracle& oracle, const StepSource& steps, std::size_t T,
                  const Vector& x1, const RunOptions& options) {
  const auto start = Clock::now();
  const Problem& problem = oracle.problem();
  const Geometry& geom = problem.geometry;
  check_start(problem, x1);
  if (T < 1) throw DomainError("run_smd: T must be at least 1");

  RunRecord rec;
  rec.algorithm = Algorithm::Smd;
  rec.seed = oracle.seed();
  rec.T = T;
  if (options.keep_rows) rec.rows.reserve(T);

  Vector x = x1;
  double total = 0.0;
  for (std::size_t t = 1; t <= T; ++t) {
    const StepParams s = next_params(steps, t, geom.norm(sub(x, x1)));
    const Vector raw = oracle.stochastic_grad(x);
    const double raw_norm = geom.dual_norm(raw);
    const bool did_clip = raw_norm > s.lambda;
    const Vector g = clip(raw, s.lambda, geom.dual());
    Vector x_next = geom.mirror_step(x, g, s.eta);
    const double delta_next = problem.gap(x_next);
    total += delta_next;
    if (did_clip) ++rec.clipped_steps;
    if (options.keep_rows) rec.rows.push_back({t, s.eta, s.lambda, did_clip, raw_norm, delta_next});
    if (options.observer) {
      const Vector grad = problem.gradient(x);
      options.observer(StepContext{.algorithm = Algorithm::Smd,
                                   .t = t,
                                   .params = s,
                                   .x = x,
                                   .grad = grad,
                                   .clipped = g,
                                   .x_next = x_next});
    }
    x = std::move(x_next);
  }
  rec.steps = T;
  rec.summary = total / static_cast<double>(T);
  rec.final_gap = problem.gap(x);
  rec.final_iterate = std::move(x);
  rec.wall_seconds = seconds_since(start);
  return rec;
}

RunRecord run_asmd(Oracle& oracle, const StepSource& steps, std::size_t T,
                   const Vector& y1, const RunOptions& options) {
  const auto start = Clock::now();
  const Problem& problem = oracle.problem();
  const Geometry& geom = problem.geometry;
  check_start(problem, y1);
  if (T < 1) throw DomainError("run_asmd: T must be at least 1");

  RunRecord rec;
  rec.algorithm = Algorithm::Asmd;
  rec.seed = oracle.seed();
  rec.T = T;
  if (options.keep_rows) rec.rows.reserve(T);

  Vector y = y1;
  Vector z = y1;
  for (std::size_t t = 1; t <= T; ++t) {
    const double alpha = 2.0 / (static_cast<double>(t) + 1.0);
    // alpha_1 = 1 gives x_1 = z_1 exactly
    const Vector x = t == 1 ? z : lerp(y, z, alpha);
    StepParams s = next_params(steps, t, geom.norm(sub(x, y1)));
    s.alpha = alpha;
    const Vector raw = oracle.stochastic_grad(x);
    const double raw_norm = geom.dual_norm(raw);
    const bool did_clip = raw_norm > s.lambda;
    const Vector g = clip(raw, s.lambda, geom.dual());
    Vector z_next = geom.mirror_step(z, g, s.eta);
    Vector y_next = t == 1 ? z_next : lerp(y, z_next, alpha);
    const double gap = problem.gap(y_next);
    if (did_clip) ++rec.clipped_steps;
    if (options.keep_rows) rec.rows.push_back({t, s.eta, s.lambda, did_clip, raw_norm, gap});
    if (options.observer) {
      const Vector grad = problem.gradient(x);
      options.observer(StepContext{.algorithm = Algorithm::Asmd,
                                   .t = t,
                                   .params = s,
                                   .x = x,
                                   .grad = grad,
                                   .clipped = g,
                                   .x_next = {},
                                   .y = y,
                                   .z = z,
                                   .y_next = y_next,
                                   .z_next = z_next});
    }
    y = std::move(y_next);
    z = std::move(z_next);
  }
  rec.steps = T;
  rec.summary = problem.gap(y);
  rec.final_gap = rec.summary;
  rec.final_iterate = std::move(y);
  rec.wall_seconds = seconds_since(start);
  return rec;
}

RunRecord run_sgd(Oracle& oracle, const StepSource& steps, std::size_t T,
                  const Vector& x1, const RunOptions& options) {
  const auto start = Clock::now();
  const Problem& problem = oracle.problem();
  check_euclidean(problem, "run_sgd");
  check_start(problem, x1);
  if (T < 1) throw DomainError("run_sgd: T must be at least 1");

  RunRecord rec;
  rec.algorithm = Algorithm::Sgd;
  rec.seed = oracle.seed();
  rec.T = T;
  if (options.keep_rows) rec.rows.reserve(T);

  Vector x = x1;
  double total = 0.0;
  for (std::size_t t = 1; t <= T; ++t) {
    const StepParams s = next_params(steps, t, norm2(sub(x, x1)));
    const Vector grad = problem.gradient(x);
    const double gsq = squared_norm2(grad);
    total += gsq;
    const Vector raw = oracle.stochastic_grad(x);
    const double raw_norm = norm2(raw);
    const bool did_clip = raw_norm > s.lambda;
    const Vector g = clip(raw, s.lambda, NormKind::L2);
    Vector x_next = axpy(x, -s.eta, g);
    if (did_clip) ++rec.clipped_steps;
    if (options.keep_rows) rec.rows.push_back({t, s.eta, s.lambda, did_clip, raw_norm, gsq});
    if (options.observer) {
      options.observer(StepContext{.algorithm = Algorithm::Sgd,
                                   .t = t,
                                   .params = s,
                                   .x = x,
                                   .grad = grad,
                                   .clipped = g,
                                   .x_next = x_next});
    }
    x = std::move(x_next);
  }
  rec.steps = T;
  rec.summary = total / static_cast<double>(T);
  rec.final_gap = problem.gap(x);
  rec.final_iterate = std::move(x);
  rec.wall_seconds = seconds_since(start);
  return rec;
}

RunRecord run_vanilla_sgd(Oracle& oracle, double eta, std::size_t T,
                          const Vector& x1, const RunOptions& options) {
  const auto start = Clock::now();
  const Problem& problem = oracle.problem();
  check_euclidean(problem, "run_vanilla_sgd");
  check_start(problem, x1);
  if (T < 1) throw DomainError("run_vanilla_sgd: T must be at least 1");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("run_vanilla_sgd: eta must be positive");

  RunRecord rec;
  rec.algorithm = Algorithm::VanillaSgd;
  rec.seed = oracle.seed();
  rec.T = T;
  if (options.keep_rows) rec.rows.reserve(T);

  const double inf = std::numeric_limits<double>::infinity();
  Vector x = x1;
  double total = 0.0;
  std::size_t t = 1;
  for (; t <= T; ++t) {
    const Vector grad = problem.gradient(x);
    const double gsq = squared_norm2(grad);
    total += gsq;
    const Vector raw = oracle.stochastic_grad(x);
    Vector x_next = axpy(x, -eta, raw);
    if (options.keep_rows) rec.rows.push_back({t, eta, inf, false, norm2(raw), gsq});
    if (options.observer) {
      options.observer(StepContext{.algorithm = Algorithm::VanillaSgd,
                                   .t = t,
                                   .params = {eta, inf, 1.0},
                                   .x = x,
                                   .grad = grad,
                                   .clipped = raw,
                                   .x_next = x_next});
    }
    x = std::move(x_next);
    bool bad = false;
    for (double v : x) {
      if (!std::isfinite(v) || std::abs(v) > kDivergenceThreshold) bad = true;
    }
    if (bad) {
      rec.diverged = true;
      break;
    }
  }
  rec.steps = rec.diverged ? t : T;
  rec.summary = rec.diverged ? inf : total / static_cast<double>(T);
  rec.final_gap = rec.diverged ? inf : problem.gap(x);
  rec.final_iterate = std::move(x);
  rec.wall_seconds = seconds_since(start);
  return rec;
}

RunRecord run_smd(Oracle& oracle, const Schedule& schedule, std::size_t T,
                  const Vector& x1, const RunOptions& options) {
  if (!is_smd(schedule.mode())) {
    throw DomainError("run_smd: schedule mode " + to_string(schedule.mode()) + " is not an SMD mode");
  }
  return run_smd(oracle, from_schedule(schedule), T, x1, options);
}

RunRecord run_asmd(Oracle& oracle, const Schedule& schedule, std::size_t T,
                   const Vector& y1, const RunOptions& options) {
  if (!is_asmd(schedule.mode())) {
    throw DomainError("run_asmd: schedule mode " + to_string(schedule.mode()) + " is not an ASMD mode");
  }
  const Problem& problem = oracle.problem();
  if (problem.x_star) {
    const Vector g = problem.gradient(*problem.x_star);
    if (problem.geometry.dual_norm(g) > 1e-10) {
      throw DomainError("run_asmd: requires grad f(x*) = 0");
    }
  }
  return run_asmd(oracle, from_schedule(schedule), T, y1, options);
}

RunRecord run_sgd(Oracle& oracle, const Schedule& schedule, std::size_t T,
                  const Vector& x1, const RunOptions& options) {
  if (!is_sgd(schedule.mode())) {
    throw DomainError("run_sgd: schedule mode " + to_string(schedule.mode()) + " is not an SGD mode");
  }
  return run_sgd(oracle, from_schedule(schedule), T, x1, options);
}

}  // namespace cliplab
