// cliplab: run, rates, diagnose, compare.
//
// Exit codes: 0 success, 1 runtime failure or failed check, 2 invalid input.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "cliplab/config.hpp"
#include "cliplab/diagnostics.hpp"
#include "cliplab/harness.hpp"
#include "cliplab/io.hpp"

namespace fs = std::filesystem;
using namespace cliplab;

namespace {

struct CommonOptions {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  std::size_t seeds = 0;
  std::size_t jobs = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "experiment config file")->required();
  cmd->add_option("--set", o.sets, "override, section.key=value (repeatable)");
  cmd->add_option("--out", o.out, "output directory (overrides experiment.out)");
  cmd->add_option("--seeds", o.seeds, "number of seeds (overrides experiment.seeds)");
  cmd->add_option("--jobs", o.jobs, "worker threads (overrides experiment.jobs)");
}

/// Thrown for bad input that should map to exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ExperimentConfig load(const CommonOptions& o) {
  std::vector<std::string> overrides = o.sets;
  if (!o.out.empty()) overrides.push_back("experiment.out=" + o.out);
  if (o.seeds) overrides.push_back("experiment.seeds=" + std::to_string(o.seeds));
  if (o.jobs) overrides.push_back("experiment.jobs=" + std::to_string(o.jobs));
  return load_config(o.config, overrides);
}

Experiment checked_experiment(const ExperimentConfig& c, std::size_t T) {
  try {
    return build_experiment(c, T);
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
}

fs::path output_dir(const ExperimentConfig& c) {
  try {
    return result_dir(c.out, c.id, c.algorithm, c.p);
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

int cmd_run(const CommonOptions& o) {
  const ExperimentConfig c = load(o);
  checked_experiment(c, c.T);
  const fs::path dir = output_dir(c);
  const TrialSummary s = run_trials(c);
  print_warnings(s.warnings);
  write_file(c.out, dir / "seed-results.csv", seed_results_csv(s));
  write_file(c.out, dir / "summary.jsonl", summary_json(s) + "\n");
  std::cout << "algorithm=" << to_string(s.algorithm) << " schedule=" << s.schedule
            << " T=" << s.T << " N=" << s.N << " median=" << format_double(s.median)
            << " upper=" << format_double(s.upper_quantile) << " bound=" << format_double(s.bound)
            << " failure_rate=" << fixed(s.failure_rate) << " diverged=" << s.diverged << "\n";
  std::cout << "wrote " << (dir / "seed-results.csv").string() << "\n";
  return 0;
}

int cmd_rates(const CommonOptions& o, bool self_test) {
  const ExperimentConfig c = load(o);
  if (c.T_grid.size() < 4) {
    throw InputError("experiment.T_grid: rates needs at least 4 horizons");
  }
  RateFit fit;
  if (self_test) {
    std::vector<double> T, metric;
    for (std::size_t t : c.T_grid) {
      T.push_back(static_cast<double>(t));
      metric.push_back(7.0 * std::pow(static_cast<double>(t), -0.5));
    }
    fit = fit_power_law(T, metric);
    fit.theoretical = -0.5;
    fit.deviation = fit.slope - fit.theoretical;
  } else {
    for (std::size_t T : c.T_grid) checked_experiment(c, T);
    fit = fit_rate(c);
  }
  const fs::path dir = output_dir(c);
  std::string csv, jsonl;
  for (const auto& t : fit.trials) {
    print_warnings(t.warnings);
    const std::string part = seed_results_csv(t);
    csv += csv.empty() ? part : part.substr(part.find("\r\n", part.find("\r\n") + 2) + 2);
    jsonl += summary_json(t) + "\n";
  }
  jsonl += rate_fit_json(fit) + "\n";
  if (!csv.empty()) write_file(c.out, dir / "seed-results.csv", csv);
  write_file(c.out, dir / "rates.jsonl", jsonl);
  for (std::size_t i = 0; i < fit.T.size(); ++i) {
    std::cout << "T=" << fit.T[i] << " median=" << format_double(fit.metric[i]) << "\n";
  }
  std::cout << "slope=" << fixed(fit.slope) << " target=" << fixed(fit.theoretical)
            << " deviation=" << fixed(fit.deviation) << " r2=" << fixed(fit.r_squared) << "\n";
  return 0;
}

int cmd_diagnose(const CommonOptions& o) {
  const ExperimentConfig c = load(o);
  const Experiment e = checked_experiment(c, c.T);
  const fs::path dir = output_dir(c);
  print_warnings(config_warnings(c));
  std::string jsonl;
  bool ok = true;
  auto line = [](const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "PASS " : "FAIL ") << name << " " << detail << "\n";
  };

  if (e.schedule) {
    const ConditionReport rep = verify_proposition_conditions(*e.schedule, c.T);
    for (const auto& k : rep.conditions) {
      line("condition." + k.name, k.passed,
           "lhs=" + format_double(k.lhs) + " rhs=" + format_double(k.rhs) +
               (k.vacuous ? " (vacuous)" : ""));
    }
    ok = ok && rep.all_passed();
    jsonl += conditions_json(c.schedule, rep) + "\n";
  }

  {
    const auto grid = lambda_grid(1.0, 20);
    const bool r = check_lemma2_mgf(1.0, grid, DiscreteLaw::rademacher(1.0)).all_hold();
    const bool a = check_lemma2_mgf(1.0, grid, DiscreteLaw::two_point(1.0, 0.25)).all_hold();
    const bool cosh_ok = std::cosh(1.0) <= std::exp(0.75);
    CheckReport rep{.name = "mgf_bound", .steps = 2 * grid.size() + 1};
    rep.record(r ? -1.0 : 1.0, 0.0);
    rep.record(a ? -1.0 : 1.0, 0.0);
    rep.record(std::cosh(1.0) - std::exp(0.75), 0.0);
    line("mgf_bound", rep.passed(), "rademacher=" + std::to_string(r) + " two_point=" +
                                        std::to_string(a) + " cosh1<=e^0.75=" +
                                        std::to_string(cosh_ok));
    ok = ok && rep.passed();
    jsonl += check_json(rep) + "\n";
  }
  {
    const double s = check_fact1(1000000);
    CheckReport rep{.name = "anytime_series_sum", .steps = 1000000};
    rep.record(s - 1.0, 0.0);
    line("anytime_series_sum", rep.passed(), "sum=" + fixed(s));
    ok = ok && rep.passed();
    jsonl += check_json(rep) + "\n";
  }

  if (c.lemma1 && c.algorithm != Algorithm::VanillaSgd) {
    Oracle oracle(e.problem, e.noise, c.base_seed);
    const double lam = e.steps().params(1).lambda;
    const ClipBoundsReport rep = check_lemma1_bounds(oracle, e.x1, lam, c.lemma1_m);
    line("clipping_bias_bounds", rep.passed(),
         "theta_u_violations=" + std::to_string(rep.theta_u_bound.violations) +
             " bias=" + format_double(rep.bias) + "/" + format_double(rep.bias_bound) +
             (rep.bias_applicable ? "" : " (bias n/a)") +
             " second_moment=" + format_double(rep.second_moment) + "/" +
             format_double(rep.second_moment_bound));
    ok = ok && rep.passed();
    CheckReport r = rep.theta_u_bound;
    r.name = "clipping_bias_bounds";
    if (!rep.passed()) r.record(1.0, 0.0);
    jsonl += check_json(r) + "\n";
  }

  if (c.pathwise && c.algorithm != Algorithm::VanillaSgd) {
    ExperimentConfig pc = c;
    pc.pathwise = true;
    const TrialSummary s = run_trials(pc);
    CheckReport rep{.name = "pathwise_inequality"};
    for (const auto& r : s.seeds) {
      rep.steps += r.steps;
      rep.violations += r.pathwise_violations;
      rep.max_margin = std::max(rep.max_margin, r.pathwise_max_margin);
    }
    line("pathwise_inequality", rep.passed(),
         "steps=" + std::to_string(rep.steps) + " violations=" + std::to_string(rep.violations) +
             " max_margin=" + format_double(rep.max_margin));
    ok = ok && rep.passed();
    jsonl += check_json(rep) + "\n";
  }

  if (c.martingale && (c.algorithm == Algorithm::Smd || c.algorithm == Algorithm::Sgd)) {
    if (!e.schedule) throw InputError("diagnostics.martingale: needs a theorem schedule");
    std::vector<char> crossed(c.seeds, 0);
    const double Q = c.Q.value_or(std::max(1.0, e.schedule->constants(c.T).A));
    parallel_for(c.seeds, c.jobs, [&](std::size_t i) {
      Oracle oracle(e.problem, e.noise, c.base_seed + i);
      const MartingaleTrace tr =
          c.algorithm == Algorithm::Smd
              ? martingale_trace_smd(oracle, e.steps(), c.T, e.x1, Q, c.delta, c.m)
              : martingale_trace_sgd(oracle, *e.schedule, c.T, e.x1, c.delta, c.m);
      crossed[i] = tr.crossed;
    });
    std::size_t n = 0;
    for (char x : crossed) n += x;
    const double freq = static_cast<double>(n) / static_cast<double>(c.seeds);
    const double slack = 3.0 * std::sqrt(c.delta * (1.0 - c.delta) / static_cast<double>(c.seeds));
    CheckReport rep{.name = "supermartingale_crossing", .steps = c.seeds};
    rep.record(freq - (c.delta + slack), 0.0);
    rep.note = "crossings=" + std::to_string(n);
    line("supermartingale_crossing", rep.passed(),
         "frequency=" + fixed(freq) + " limit=" + fixed(c.delta + slack));
    ok = ok && rep.passed();
    jsonl += check_json(rep) + "\n";
  }

  write_file(c.out, dir / "diagnostics.jsonl", jsonl);
  return ok ? 0 : 1;
}

int cmd_compare(const CommonOptions& o) {
  const ExperimentConfig c = load(o);
  checked_experiment(c, c.T);
  if (c.algorithm != Algorithm::Sgd) {
    throw InputError("experiment.algorithm: compare needs sgd (the clipped arm)");
  }
  const fs::path dir = output_dir(c);
  print_warnings(config_warnings(c));
  const CompareReport r = compare_clipped_vanilla(c);
  std::string csv = "# schema=1\r\n" + csv_row({"seed", "clipped_gap", "vanilla_gap"});
  for (std::size_t i = 0; i < r.N; ++i) {
    csv += csv_row({std::to_string(c.base_seed + i), format_double(r.clipped_gaps[i]),
                    format_double(r.vanilla_gaps[i])});
  }
  write_file(c.out, dir / "compare-results.csv", csv);
  write_file(c.out, dir / "compare.jsonl", compare_json(r) + "\n");
  std::cout << "T=" << r.T << " N=" << r.N << " clipped_median=" << format_double(r.clipped_median)
            << " vanilla_median=" << format_double(r.vanilla_median)
            << " ratio=" << fixed(r.ratio) << " clipped_wins=" << r.clipped_wins
            << " vanilla_diverged=" << r.vanilla_diverged << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cliplab: clipped stochastic first-order methods under heavy-tailed noise"};
  app.require_subcommand(1);
  CommonOptions run_o, rates_o, diag_o, cmp_o;
  bool self_test = false;
  auto* run = app.add_subcommand("run", "seeded trials and theorem-bound failure rate");
  add_common(run, run_o);
  auto* rates = app.add_subcommand("rates", "log-log rate fit over experiment.T_grid");
  add_common(rates, rates_o);
  rates->add_flag("--self-test", self_test, "fit an exact 7 T^-0.5 law on the grid");
  auto* diag = app.add_subcommand("diagnose", "proposition conditions and inequality checks");
  add_common(diag, diag_o);
  auto* cmp = app.add_subcommand("compare", "paired clipped vs unclipped SGD");
  add_common(cmp, cmp_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(run_o);
    if (*rates) return cmd_rates(rates_o, self_test);
    if (*diag) return cmd_diagnose(diag_o);
    if (*cmp) return cmd_compare(cmp_o);
  } catch (const ConfigError& e) {
    for (const auto& msg : e.errors()) std::cerr << "error: " << msg << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
