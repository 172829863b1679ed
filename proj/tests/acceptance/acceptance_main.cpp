// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cliplab/clipping.hpp"
#include "cliplab/diagnostics.hpp"
#include "cliplab/harness.hpp"
#include "cliplab/io.hpp"
#include "cliplab/schedules.hpp"

using namespace cliplab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

ExperimentConfig base(Algorithm alg, const std::string& schedule, const std::string& problem) {
  ExperimentConfig c;
  c.id = "acceptance";
  c.algorithm = alg;
  c.schedule = schedule;
  c.problem = problem;
  c.dim = 2;
  c.noise = "none";
  c.p = 2.0;
  c.sigma = 0.0;
  return c;
}

ExperimentConfig two_point(ExperimentConfig c, double p, double sigma, double q) {
  c.noise = "two_point";
  c.p = p;
  c.sigma = sigma;
  c.q = q;
  return c;
}

std::vector<double> doubling_ratios(ExperimentConfig c, const std::vector<std::size_t>& Ts) {
  c.seeds = 1;
  std::vector<double> metric;
  for (std::size_t T : Ts) metric.push_back(run_trials(c, T).median);
  std::vector<double> ratios;
  for (std::size_t i = 1; i < metric.size(); ++i) ratios.push_back(metric[i] / metric[i - 1]);
  return ratios;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i], 3);
  return s;
}

// 1. Noise-free doubling ratios.
Outcome ac1() {
  const std::vector<std::size_t> Ts{256, 512, 1024, 2048, 4096};
  auto max_of = [](const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); };

  ExperimentConfig smd = base(Algorithm::Smd, "smd_known_T", "quadratic");
  smd.delta = 0.5;
  const auto r_smd = doubling_ratios(smd, Ts);

  ExperimentConfig asmd = base(Algorithm::Asmd, "asmd_known_T", "quadratic");
  asmd.delta = 0.5;
  asmd.c_override = 1000.0;
  const auto r_asmd = doubling_ratios(asmd, Ts);
  asmd.c_override.reset();
  const auto r_asmd_verbatim = doubling_ratios(asmd, Ts);

  ExperimentConfig sgd = base(Algorithm::Sgd, "sgd_known_T", "nonconvex_ratio");
  sgd.delta = 0.5;
  sgd.p = 1.25;
  sgd.x1 = {0.1, 0.0};
  const auto r_sgd = doubling_ratios(sgd, Ts);

  const bool pass = max_of(r_smd) <= 0.6 && max_of(r_asmd) <= 0.35 && max_of(r_sgd) <= 0.75;
  return {pass, "smd=[" + join(r_smd) + "]<=0.6 asmd(c=1e3)=[" + join(r_asmd) +
                    "]<=0.35 asmd(c=1e4, recorded)=[" + join(r_asmd_verbatim) + "] sgd=[" +
                    join(r_sgd) + "]<=0.75"};
}

// 2. Heavy-tailed rate exponents.
Outcome ac2() {
  struct Case {
    Algorithm alg;
    std::string schedule, problem;
    double p, sigma;
    Vector x1;
  };
  const std::vector<Case> cases{
      {Algorithm::Smd, "smd_known_T", "quadratic", 1.5, 0.02, {}},
      {Algorithm::Smd, "smd_known_T", "quadratic", 2.0, 0.1, {}},
      {Algorithm::Sgd, "sgd_known_T", "nonconvex_ratio", 1.5, 0.07, {0.5, 0.0}},
      {Algorithm::Sgd, "sgd_known_T", "nonconvex_ratio", 2.0, 0.2, {0.5, 0.0}},
  };
  bool pass = true;
  std::string detail;
  for (const auto& k : cases) {
    ExperimentConfig c = two_point(base(k.alg, k.schedule, k.problem), k.p, k.sigma, 0.01);
    c.delta = 0.5;
    c.seeds = 200;
    c.x1 = k.x1;
    c.T_grid = {256, 1024, 4096, 16384};
    const RateFit fit = fit_rate(c);
    const bool ok = std::abs(fit.deviation) <= 0.15;
    pass = pass && ok;
    detail += to_string(k.alg) + "/" + p_label(k.p) + " slope=" + fmt(fit.slope) + " target=" +
              fmt(fit.theoretical) + (ok ? "" : " (off)") + "; ";
  }
  return {pass, detail};
}

// 3. Failure rate against the explicit theorem bound.
Outcome ac3() {
  const double limit = 0.1 + 3.0 * std::sqrt(0.09 / 1000.0);
  bool pass = true;
  std::string detail;
  for (double p : {1.5, 2.0}) {
    for (int which = 0; which < 2; ++which) {
      ExperimentConfig c =
          which == 0 ? base(Algorithm::Smd, "smd_known_T", "quadratic")
                     : base(Algorithm::Sgd, "sgd_known_T", "nonconvex_ratio");
      c = two_point(c, p, 1.0, 0.01);
      c.delta = 0.1;
      c.seeds = 1000;
      const TrialSummary s = run_trials(c, 1024);
      const bool ok = !std::isnan(s.bound) && s.failure_rate <= limit;
      pass = pass && ok;
      detail += to_string(c.algorithm) + "/" + p_label(p) + " rate=" + fmt(s.failure_rate) +
                " upper_q=" + fmt(s.upper_quantile) + " bound=" + fmt(s.bound) + "; ";
    }
  }
  return {pass, detail + "limit=" + fmt(limit)};
}

// 4. Clipped-noise bounds on a (p, lambda) grid.
Outcome ac4() {
  const Problem prob = make_quadratic(2, {1.0, 1.0}, {0.0, 0.0});
  const Vector x{0.1, 0.0};
  const std::size_t m = 111112;  // 9 cells, >= 10^6 draws in total
  std::size_t draws = 0, violations = 0;
  bool moments_ok = true;
  std::string detail;
  std::uint64_t seed = 4000;
  for (double p : {1.25, 1.5, 2.0}) {
    for (double lambda : {1.0, 3.0, 8.0}) {
      Oracle oracle(prob, make_two_point(p, 1.0, 0.01), seed++);
      const ClipBoundsReport r = check_lemma1_bounds(oracle, x, lambda, m);
      draws += r.theta_u_bound.steps;
      violations += r.theta_u_bound.violations;
      moments_ok = moments_ok && r.bias_applicable && r.bias_holds && r.second_moment_holds;
    }
  }
  detail = "draws=" + std::to_string(draws) + " violations=" + std::to_string(violations) +
           " moments=" + (moments_ok ? "ok" : "violated");
  return {violations == 0 && moments_ok && draws >= 1000000, detail};
}

// 5. Exact moment-generating-function checks.
Outcome ac5() {
  const double R = 2.0;
  const auto grid = lambda_grid(R, 20);
  const bool rad = check_lemma2_mgf(R, grid, DiscreteLaw::rademacher(R)).all_hold();
  const bool asym = check_lemma2_mgf(R, grid, DiscreteLaw::two_point(R, 0.3)).all_hold();
  const bool cosh_ok = std::cosh(1.0) <= std::exp(0.75);
  return {rad && asym && cosh_ok && grid.size() == 20,
          std::string("rademacher=") + (rad ? "ok" : "fail") + " two_point=" +
              (asym ? "ok" : "fail") + " cosh(1)=" + fmt(std::cosh(1.0), 6) +
              " e^0.75=" + fmt(std::exp(0.75), 6)};
}

// 6. Per-step inequalities along seeded runs.
Outcome ac6() {
  struct Case {
    std::string name;
    ExperimentConfig c;
  };
  std::vector<Case> cases;
  cases.push_back({"smd", two_point(base(Algorithm::Smd, "smd_known_T", "quadratic"), 1.5, 1.0, 0.01)});
  cases.push_back(
      {"smd_simplex", two_point(base(Algorithm::Smd, "smd_known_T", "simplex_quadratic"), 1.5, 1.0, 0.01)});
  cases.push_back(
      {"smd_G>0", two_point(base(Algorithm::Smd, "smd_known_T", "nonsmooth_quadratic"), 1.5, 1.0, 0.01)});
  cases.push_back({"asmd", two_point(base(Algorithm::Asmd, "asmd_known_T", "quadratic"), 1.5, 1.0, 0.01)});
  cases.push_back({"sgd", two_point(base(Algorithm::Sgd, "sgd_known_T", "nonconvex_ratio"), 1.5, 1.0, 0.01)});
  cases.back().c.x1 = {0.5, 0.0};
  bool pass = true;
  std::string detail;
  for (auto& k : cases) {
    k.c.seeds = 50;
    k.c.pathwise = true;
    const TrialSummary s = run_trials(k.c, 1000);
    std::size_t v = 0, steps = 0;
    double worst = -INFINITY;
    for (const auto& r : s.seeds) {
      v += r.pathwise_violations;
      steps += r.steps;
      worst = std::max(worst, r.pathwise_max_margin);
    }
    pass = pass && v == 0 && steps == 50 * 1000;
    detail += k.name + ":" + std::to_string(v) + "/" + std::to_string(steps) +
              " max_margin=" + fmt(worst, 3) + "; ";
  }
  return {pass, detail};
}

// 7. Supermartingale crossing frequency.
Outcome ac7() {
  const std::size_t N = 1000, T = 200, m = 200;
  const double delta = 0.1;
  bool pass = true;
  std::string detail;
  for (int which = 0; which < 2; ++which) {
    ExperimentConfig c = which == 0 ? base(Algorithm::Smd, "smd_known_T", "quadratic")
                                    : base(Algorithm::Sgd, "sgd_known_T", "nonconvex_ratio");
    c = two_point(c, 1.5, 1.0, 0.01);
    c.delta = delta;
    if (which == 1) c.x1 = {0.5, 0.0};
    const Experiment e = build_experiment(c, T);
    const double Q = std::max(1.0, e.schedule->constants(T).A);
    std::vector<char> crossed(N, 0);
    std::vector<double> max_s(N, 0.0);
    parallel_for(N, 1, [&](std::size_t i) {
      Oracle oracle(e.problem, e.noise, 7000 + i);
      const MartingaleTrace tr =
          which == 0 ? martingale_trace_smd(oracle, e.steps(), T, e.x1, Q, delta, m)
                     : martingale_trace_sgd(oracle, *e.schedule, T, e.x1, delta, m);
      crossed[i] = tr.crossed;
      max_s[i] = tr.max_S;
    });
    std::size_t n = 0;
    for (char x : crossed) n += x;
    const double freq = static_cast<double>(n) / static_cast<double>(N);
    pass = pass && freq <= 0.128;
    detail += to_string(c.algorithm) + " crossing=" + fmt(freq) + " median_max_S=" +
              fmt(quantile(max_s, 0.5)) + " threshold=" + fmt(std::log(1.0 / delta)) + "; ";
  }
  return {pass, detail + "limit=0.128"};
}

// 8. Proposition conditions on a grid, plus a corrupted schedule.
Outcome ac8() {
  std::size_t checked = 0, failed = 0;
  std::string first_failure;
  const std::vector<ScheduleMode> modes{ScheduleMode::SmdKnownT, ScheduleMode::SmdAnytime,
                                        ScheduleMode::SmdParamFree, ScheduleMode::SgdKnownT,
                                        ScheduleMode::SgdAnytime};
  for (ScheduleMode mode : modes) {
    for (double p : {1.25, 1.5, 2.0}) {
      for (double sigma : {0.0, 0.5, 3.0}) {
        for (double delta : {0.01, 0.1, 0.5}) {
          for (std::size_t T : {50u, 1000u}) {
            ScheduleInputs in;
            in.p = p;
            in.sigma = sigma;
            in.L = 2.0;
            in.delta = delta;
            in.R1 = 1.5;
            in.R0 = 0.5;
            in.g0_norm = 0.7;
            in.T = static_cast<std::int64_t>(T);
            in.c1 = 2.0;
            in.c2 = std::pow(sigma, p) > 0 ? std::pow(sigma, p) : 1.0;
            in.grad1 = 3.0;
            in.Delta1 = 2.0;
            Schedule s(mode, in);
            if (mode == ScheduleMode::SmdParamFree) {
              for (std::size_t t = 1; t <= T; ++t) s.observe(t, 0.5 * std::sqrt(double(t)) / 10.0);
            }
            const ConditionReport rep = verify_proposition_conditions(s, T);
            ++checked;
            if (!rep.all_passed()) {
              ++failed;
              if (first_failure.empty()) first_failure = to_string(mode) + " p=" + fmt(p);
            }
          }
        }
      }
    }
  }
  ScheduleInputs bad;
  bad.p = 1.5;
  bad.sigma = 1.0;
  bad.L = 1.0;
  bad.delta = 0.1;
  bad.R1 = 1.0;
  bad.g0_norm = 1.0;
  bad.T = 1000;
  bad.eta_scale = 8.0;
  const bool corrupted_fails = !verify_proposition_conditions(Schedule(ScheduleMode::SmdKnownT, bad), 1000).all_passed();
  return {failed == 0 && corrupted_fails,
          "grid=" + std::to_string(checked) + " failed=" + std::to_string(failed) +
              (first_failure.empty() ? "" : " first=" + first_failure) +
              " corrupted_rejected=" + (corrupted_fails ? "yes" : "no")};
}

// 9. Anytime series partial sum.
Outcome ac9() {
  const double s = check_fact1(1000000);
  return {s < 1.0, "partial_sum=" + fmt(s, 6)};
}

// 10. Anytime vs known-T at T = 4096, p = 2.
Outcome ac10() {
  const std::size_t T = 4096;
  ExperimentConfig c = two_point(base(Algorithm::Smd, "smd_known_T", "quadratic"), 2.0, 0.1, 0.01);
  c.delta = 0.5;
  c.seeds = 200;
  const double known = run_trials(c, T).median;
  c.schedule = "smd_anytime";
  const double anytime = run_trials(c, T).median;
  const double factor = std::pow(1.0 + std::log(static_cast<double>(T)), 2.0 / c.p);
  const double ratio = anytime / known;
  return {ratio <= 3.0 * factor, "known=" + fmt(known) + " anytime=" + fmt(anytime) +
                                     " ratio=" + fmt(ratio) + " limit=" + fmt(3.0 * factor)};
}

// 11. Clipped vs unclipped SGD under spiky noise.
Outcome ac11() {
  ExperimentConfig c = two_point(base(Algorithm::Sgd, "constant", "quadratic"), 1.5, 1.0, 0.001);
  c.seeds = 200;
  c.T = 4096;
  c.eta = 0.01;
  c.lambda = 1.0;
  const CompareReport fixed = compare_clipped_vanilla(c);

  ExperimentConfig th = c;
  th.schedule = "sgd_known_T";
  th.eta.reset();
  th.lambda.reset();
  const CompareReport theorem = compare_clipped_vanilla(th);
  return {fixed.clipped_median < fixed.vanilla_median,
          "fixed(eta=0.01,lambda=1): clipped=" + fmt(fixed.clipped_median) +
              " vanilla=" + fmt(fixed.vanilla_median) +
              " vanilla_diverged=" + std::to_string(fixed.vanilla_diverged) +
              "; theorem schedule (recorded): clipped=" + fmt(theorem.clipped_median) +
              " vanilla=" + fmt(theorem.vanilla_median)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"deterministic_rates", ac1}, {"heavy_tailed_exponents", ac2},
      {"high_probability", ac3},    {"clipping_bias_bounds", ac4},
      {"mgf_bound", ac5},           {"pathwise_inequalities", ac6},
      {"supermartingale", ac7},     {"proposition_conditions", ac8},
      {"anytime_series", ac9},      {"anytime_vs_known", ac10},
      {"clipped_vs_vanilla", ac11}};
  std::vector<std::string> only(argv + 1, argv + argc);
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const std::string id = "AC" + std::to_string(i + 1);
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s %s %s (%.1fs)\n", id.c_str(), o.pass ? "PASS" : "FAIL",
                criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
