#include "cliplab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "cliplab/clipping.hpp"
#include "cliplab/diagnostics.hpp"

namespace cliplab {

namespace {

constexpr std::uint64_t kG0Stream = 0x90;

Vector default_x1(const ExperimentConfig& c, const Problem& problem) {
  if (!c.x1.empty()) return c.x1;
  Vector x(c.dim, 0.0);
  if (c.problem == "simplex_quadratic") {
    // (2, 1, ..., 1) / (d + 1): interior and away from the uniform default target
    const double n = static_cast<double>(c.dim + 1);
    for (auto& v : x) v = 1.0 / n;
    x[0] = 2.0 / n;
    return x;
  }
  if (problem.x_star) x = *problem.x_star;
  x[0] += 1.0;
  return x;
}

}  // namespace

Problem build_problem(const ExperimentConfig& c) {
  const std::size_t d = c.dim;
  if (c.problem == "quadratic") {
    const Vector diag = c.diag.empty() ? Vector(d, 1.0) : c.diag;
    const Vector shift = c.shift.empty() ? Vector(d, 0.0) : c.shift;
    std::optional<Geometry> geom;
    if (c.geometry == "ball") {
      geom = Geometry::ball(c.radius, c.center.empty() ? Vector(d, 0.0) : c.center);
    }
    return make_quadratic(d, diag, shift, geom);
  }
  if (c.problem == "simplex_quadratic") {
    const Vector target = c.target.empty() ? Vector(d, 1.0 / static_cast<double>(d)) : c.target;
    return make_simplex_quadratic(d, target);
  }
  if (c.problem == "nonconvex_ratio") return make_nonconvex_ratio(d);
  if (c.problem == "nonsmooth_quadratic") return make_nonsmooth_quadratic(d, c.weight);
  throw DomainError("problem.kind: unknown problem '" + c.problem + "'");
}

NoiseModel build_noise(const ExperimentConfig& c) {
  if (c.noise == "none") return make_no_noise(c.p);
  if (c.noise == "two_point") return make_two_point(c.p, c.sigma, c.q);
  if (c.noise == "radial_pareto") return make_radial_pareto(c.p, c.sigma, c.tail);
  throw DomainError("noise.kind: unknown noise '" + c.noise + "'");
}

Experiment build_experiment(const ExperimentConfig& c, std::size_t T) {
  Experiment e{.config = c, .problem = build_problem(c), .noise = build_noise(c), .x1 = {},
               .x0 = {}, .T = T, .schedule = std::nullopt};
  const Problem& prob = e.problem;
  const Geometry& geom = prob.geometry;
  e.x1 = default_x1(c, prob);
  e.x0 = c.x0.empty() ? e.x1 : c.x0;
  geom.check_dim(e.x1, "problem.x1");
  if (!geom.contains(e.x1)) throw DomainError("problem.x1: outside the domain");
  if (!geom.contains(e.x0)) throw DomainError("problem.x0: outside the domain");

  if (c.g0 == "exact") {
    e.g0_norm = geom.dual_norm(prob.gradient(e.x0));
    e.mu = 0.0;
  } else {
    Oracle oracle(prob, e.noise, derive_seed(c.base_seed, kG0Stream));
    const G0Estimate g0 = estimate_g0(oracle, e.x0, c.g0_blocks, c.g0_per_block);
    e.g0_norm = geom.dual_norm(g0.g0);
    e.mu = g0.mu;
  }

  const Vector& xs = prob.x_star.value();
  ScheduleInputs in;
  in.p = c.p;
  in.sigma = e.noise.degenerate() ? 0.0 : c.sigma;
  in.L = prob.L;
  in.delta = c.delta;
  in.R1 = std::sqrt(2.0 * geom.bregman(xs, e.x1));
  in.R0 = std::sqrt(2.0 * geom.bregman(xs, e.x0));
  in.mu = e.mu;
  in.g0_norm = e.g0_norm;
  in.T = static_cast<std::int64_t>(T);
  in.c1 = c.c1;
  in.c2 = c.c2;
  in.grad1 = c.grad1.value_or(geom.dual_norm(prob.gradient(e.x1)));
  in.Delta1 = prob.gap(e.x1);
  in.c_override = c.c_override;
  in.eta_scale = c.eta_scale;

  if (c.schedule != "constant") {
    e.schedule.emplace(parse_schedule_mode(c.schedule), in);
  }
  if (c.algorithm == Algorithm::VanillaSgd) {
    e.vanilla_eta = c.eta ? *c.eta : *c.vanilla_eta;
  } else if (c.vanilla_eta) {
    e.vanilla_eta = *c.vanilla_eta;
  } else if (c.schedule == "constant") {
    e.vanilla_eta = *c.eta;
  } else {
    e.vanilla_eta = e.schedule->params(1).eta;
  }
  return e;
}

StepSource Experiment::steps() const {
  if (schedule) return from_schedule(*schedule);
  return constant_steps(*config.eta,
                        config.lambda.value_or(std::numeric_limits<double>::infinity()));
}

bool Experiment::theorem_conformant() const {
  return schedule && !config.c_override && config.eta_scale == 1.0;
}

double quantile(std::vector<double> v, double level) {
  if (v.empty()) throw DomainError("quantile: no data");
  if (!(level >= 0.0 && level <= 1.0)) throw DomainError("quantile: level must lie in [0, 1]");
  std::sort(v.begin(), v.end());
  const double h = level * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double w = h - static_cast<double>(lo);
  if (w == 0.0 || v[lo] == v[hi]) return v[lo];
  return v[lo] + w * (v[hi] - v[lo]);
}

std::string config_digest(const ExperimentConfig& config) {
  // output location and thread count do not change results
  ExperimentConfig c = config;
  c.out = ExperimentConfig{}.out;
  c.jobs = ExperimentConfig{}.jobs;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_config(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void parallel_for(std::size_t n, std::size_t jobs,
                  const std::function<void(std::size_t)>& f) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

TrialSummary run_trials(const ExperimentConfig& config) { return run_trials(config, config.T); }

TrialSummary run_trials(const ExperimentConfig& config, std::size_t T) {
  const Experiment exp = build_experiment(config, T);
  TrialSummary s;
  s.digest = config_digest(config);
  s.algorithm = config.algorithm;
  s.schedule = config.schedule;
  s.p = config.p;
  s.T = T;
  s.N = config.seeds;
  s.delta = config.delta;
  s.warnings = config_warnings(config);
  s.seeds.resize(config.seeds);

  parallel_for(config.seeds, config.jobs, [&](std::size_t i) {
    const std::uint64_t seed = config.base_seed + i;
    Oracle oracle(exp.problem, exp.noise, seed);
    PathwiseMonitor monitor(oracle.problem());
    RunOptions opts;
    opts.keep_rows = false;
    if (config.pathwise && config.algorithm != Algorithm::VanillaSgd) {
      opts.observer = monitor.observer();
    }
    RunRecord rec;
    switch (config.algorithm) {
      case Algorithm::Smd:
        rec = run_smd(oracle, exp.steps(), T, exp.x1, opts);
        break;
      case Algorithm::Asmd:
        rec = run_asmd(oracle, exp.steps(), T, exp.x1, opts);
        break;
      case Algorithm::Sgd:
        rec = run_sgd(oracle, exp.steps(), T, exp.x1, opts);
        break;
      case Algorithm::VanillaSgd:
        rec = run_vanilla_sgd(oracle, exp.vanilla_eta, T, exp.x1, opts);
        break;
    }
    SeedResult r;
    r.seed = seed;
    r.summary = rec.summary;
    r.final_gap = rec.final_gap;
    r.clip_fraction = rec.clip_fraction();
    r.steps = rec.steps;
    r.diverged = rec.diverged;
    r.pathwise_violations = monitor.report().violations;
    r.pathwise_max_margin = monitor.report().steps ? monitor.report().max_margin : 0.0;
    s.seeds[i] = r;
  });

  std::vector<double> vals;
  vals.reserve(s.N);
  double clip_total = 0.0;
  for (const auto& r : s.seeds) {
    vals.push_back(r.summary);
    clip_total += r.clip_fraction;
    if (r.diverged) ++s.diverged;
  }
  s.median = quantile(vals, 0.5);
  s.upper_quantile = quantile(vals, 1.0 - config.delta);
  s.mean_clip_fraction = clip_total / static_cast<double>(s.N);
  if (exp.theorem_conformant()) {
    s.bound = theorem_bound(*exp.schedule, T);
    for (double v : vals) {
      if (v > s.bound) ++s.failures;
    }
  } else {
    s.bound = std::numeric_limits<double>::quiet_NaN();
  }
  s.failure_rate = static_cast<double>(s.failures) / static_cast<double>(s.N);
  s.failure_stderr = std::sqrt(s.failure_rate * (1.0 - s.failure_rate) / static_cast<double>(s.N));
  return s;
}

RateFit fit_power_law(const std::vector<double>& T, const std::vector<double>& metric) {
  if (T.size() != metric.size()) throw DomainError("fit_rate: grid and metric sizes differ");
  if (T.size() < 4) throw DomainError("fit_rate: need at least 4 grid points");
  const std::size_t n = T.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(T[i] > 0.0) || !(metric[i] > 0.0) || !std::isfinite(metric[i])) {
      throw DomainError("fit_rate: nonpositive metric, log undefined");
    }
    lx[i] = std::log(T[i]);
    ly[i] = std::log(metric[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw DomainError("fit_rate: grid values must differ");
  RateFit fit;
  fit.T = T;
  fit.metric = metric;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

RateFit fit_rate(const ExperimentConfig& config) {
  if (config.T_grid.size() < 4) {
    throw DomainError("experiment.T_grid: rate fits need at least 4 horizons");
  }
  std::vector<double> Ts, med;
  std::vector<TrialSummary> trials;
  for (std::size_t T : config.T_grid) {
    trials.push_back(run_trials(config, T));
    Ts.push_back(static_cast<double>(T));
    med.push_back(trials.back().median);
  }
  RateFit fit = fit_power_law(Ts, med);
  fit.trials = std::move(trials);
  const ScheduleMode mode = config.schedule == "constant"
                                ? (config.algorithm == Algorithm::Smd    ? ScheduleMode::SmdKnownT
                                   : config.algorithm == Algorithm::Asmd ? ScheduleMode::AsmdKnownT
                                                                         : ScheduleMode::SgdKnownT)
                                : parse_schedule_mode(config.schedule);
  const double sigma = config.noise == "none" ? 0.0 : config.sigma;
  fit.theoretical = theoretical_exponent(mode, config.p, sigma);
  fit.deviation = fit.slope - fit.theoretical;
  return fit;
}

CompareReport compare_clipped_vanilla(const ExperimentConfig& config) {
  if (config.algorithm != Algorithm::Sgd) {
    throw DomainError("compare: experiment.algorithm must be sgd (the clipped arm)");
  }
  const Experiment exp = build_experiment(config, config.T);
  CompareReport rep;
  rep.T = config.T;
  rep.N = config.seeds;
  rep.vanilla_eta = exp.vanilla_eta;
  rep.clipped_gaps.assign(config.seeds, 0.0);
  rep.vanilla_gaps.assign(config.seeds, 0.0);
  std::vector<char> cdiv(config.seeds, 0), vdiv(config.seeds, 0);

  parallel_for(config.seeds, config.jobs, [&](std::size_t i) {
    const std::uint64_t seed = config.base_seed + i;
    RunOptions opts;
    opts.keep_rows = false;
    Oracle a(exp.problem, exp.noise, seed);
    const RunRecord clipped = run_sgd(a, exp.steps(), config.T, exp.x1, opts);
    Oracle b(exp.problem, exp.noise, seed);
    const RunRecord vanilla = run_vanilla_sgd(b, exp.vanilla_eta, config.T, exp.x1, opts);
    rep.clipped_gaps[i] = clipped.final_gap;
    rep.vanilla_gaps[i] = vanilla.final_gap;
    cdiv[i] = !std::isfinite(clipped.final_gap);
    vdiv[i] = vanilla.diverged;
  });

  for (std::size_t i = 0; i < config.seeds; ++i) {
    rep.clipped_diverged += cdiv[i];
    rep.vanilla_diverged += vdiv[i];
    if (rep.clipped_gaps[i] < rep.vanilla_gaps[i]) ++rep.clipped_wins;
    if (rep.clipped_gaps[i] == rep.vanilla_gaps[i]) ++rep.ties;
  }
  rep.clipped_median = quantile(rep.clipped_gaps, 0.5);
  rep.vanilla_median = quantile(rep.vanilla_gaps, 0.5);
  rep.clipped_upper = quantile(rep.clipped_gaps, 1.0 - config.delta);
  rep.vanilla_upper = quantile(rep.vanilla_gaps, 1.0 - config.delta);
  if (rep.clipped_median == rep.vanilla_median) {
    rep.ratio = 1.0;
  } else {
    rep.ratio = rep.clipped_median / rep.vanilla_median;
  }
  return rep;
}

std::string p_label(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", p);
  std::string s = buf;
  while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
  s.erase(std::remove(s.begin(), s.end(), '.'), s.end());
  return "p" + s;
}

}  // namespace cliplab
