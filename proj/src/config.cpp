#include "cliplab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "cliplab/schedules.hpp"

namespace cliplab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
  const std::string t = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument("expected a number, got '" + t + "'");
  }
  return v;
}

std::uint64_t parse_uint(const std::string& s) {
  const std::string t = trim(s);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument("expected a nonnegative integer, got '" + t + "'");
  }
  return v;
}

bool parse_bool(const std::string& s) {
  const std::string t = trim(s);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw std::invalid_argument("expected true or false, got '" + t + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

Vector parse_vector(const std::string& s) {
  Vector v;
  for (const auto& item : split_list(s)) v.push_back(parse_double(item));
  return v;
}

std::string fmt_vector(const Vector& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt_double(v[i]);
  }
  return out;
}

struct Field {
  std::string section;
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename M>
Field str_field(std::string sec, std::string key, M member) {
  return {sec, key, [member](ExperimentConfig& c, const std::string& v) { c.*member = trim(v); },
          [member](const ExperimentConfig& c) { return c.*member; }};
}

template <typename M>
Field dbl_field(std::string sec, std::string key, M member) {
  return {sec, key,
          [member](ExperimentConfig& c, const std::string& v) { c.*member = parse_double(v); },
          [member](const ExperimentConfig& c) { return fmt_double(c.*member); }};
}

template <typename M>
Field opt_field(std::string sec, std::string key, M member) {
  return {sec, key,
          [member](ExperimentConfig& c, const std::string& v) {
            if (trim(v).empty() || trim(v) == "auto") {
              c.*member = std::nullopt;
            } else {
              c.*member = parse_double(v);
            }
          },
          [member](const ExperimentConfig& c) {
            return (c.*member) ? fmt_double(*(c.*member)) : std::string("auto");
          }};
}

template <typename M>
Field uint_field(std::string sec, std::string key, M member) {
  return {sec, key,
          [member](ExperimentConfig& c, const std::string& v) {
            c.*member = static_cast<std::remove_reference_t<decltype(c.*member)>>(parse_uint(v));
          },
          [member](const ExperimentConfig& c) { return std::to_string(c.*member); }};
}

template <typename M>
Field bool_field(std::string sec, std::string key, M member) {
  return {sec, key,
          [member](ExperimentConfig& c, const std::string& v) { c.*member = parse_bool(v); },
          [member](const ExperimentConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

template <typename M>
Field vec_field(std::string sec, std::string key, M member) {
  return {sec, key,
          [member](ExperimentConfig& c, const std::string& v) { c.*member = parse_vector(v); },
          [member](const ExperimentConfig& c) { return fmt_vector(c.*member); }};
}

const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  static const std::vector<Field> table = {
      str_field("experiment", "id", &C::id),
      {"experiment", "algorithm",
       [](C& c, const std::string& v) { c.algorithm = parse_algorithm(trim(v)); },
       [](const C& c) { return to_string(c.algorithm); }},
      uint_field("experiment", "seeds", &C::seeds),
      uint_field("experiment", "base_seed", &C::base_seed),
      uint_field("experiment", "T", &C::T),
      {"experiment", "T_grid",
       [](C& c, const std::string& v) {
         c.T_grid.clear();
         for (const auto& item : split_list(v)) c.T_grid.push_back(parse_uint(item));
       },
       [](const C& c) {
         std::string out;
         for (std::size_t i = 0; i < c.T_grid.size(); ++i) {
           if (i) out += ", ";
           out += std::to_string(c.T_grid[i]);
         }
         return out;
       }},
      uint_field("experiment", "jobs", &C::jobs),
      str_field("experiment", "out", &C::out),

      str_field("problem", "kind", &C::problem),
      uint_field("problem", "dim", &C::dim),
      str_field("problem", "geometry", &C::geometry),
      dbl_field("problem", "radius", &C::radius),
      vec_field("problem", "center", &C::center),
      vec_field("problem", "diag", &C::diag),
      vec_field("problem", "shift", &C::shift),
      vec_field("problem", "target", &C::target),
      dbl_field("problem", "weight", &C::weight),
      vec_field("problem", "x1", &C::x1),
      vec_field("problem", "x0", &C::x0),
      str_field("problem", "g0", &C::g0),
      uint_field("problem", "g0_blocks", &C::g0_blocks),
      uint_field("problem", "g0_per_block", &C::g0_per_block),

      str_field("noise", "kind", &C::noise),
      dbl_field("noise", "p", &C::p),
      dbl_field("noise", "sigma", &C::sigma),
      dbl_field("noise", "q", &C::q),
      dbl_field("noise", "tail", &C::tail),

      str_field("schedule", "mode", &C::schedule),
      dbl_field("schedule", "delta", &C::delta),
      dbl_field("schedule", "c1", &C::c1),
      dbl_field("schedule", "c2", &C::c2),
      opt_field("schedule", "grad1", &C::grad1),
      opt_field("schedule", "c_override", &C::c_override),
      dbl_field("schedule", "eta_scale", &C::eta_scale),
      opt_field("schedule", "eta", &C::eta),
      opt_field("schedule", "lambda", &C::lambda),

      bool_field("diagnostics", "pathwise", &C::pathwise),
      bool_field("diagnostics", "lemma1", &C::lemma1),
      bool_field("diagnostics", "martingale", &C::martingale),
      uint_field("diagnostics", "m", &C::m),
      uint_field("diagnostics", "lemma1_m", &C::lemma1_m),
      opt_field("diagnostics", "Q", &C::Q),

      opt_field("compare", "vanilla_eta", &C::vanilla_eta),
  };
  return table;
}

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : fields()) {
    if (f.section == section && f.key == key) return &f;
  }
  return nullptr;
}

bool known_section(const std::string& s) {
  for (const auto& f : fields()) {
    if (f.section == s) return true;
  }
  return false;
}

void apply(ExperimentConfig& c, const Field& f, const std::string& value,
           const std::string& where, std::vector<std::string>& errors) {
  try {
    f.set(c, value);
  } catch (const std::exception& e) {
    errors.push_back(where + ": " + f.section + "." + f.key + ": " + e.what());
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error([&] {
        std::string msg = "invalid config";
        for (const auto& e : errors) msg += "\n  " + e;
        return msg;
      }()),
      errors_(std::move(errors)) {}

ExperimentConfig parse_config(const std::string& text,
                              const std::vector<std::string>& overrides) {
  ExperimentConfig c;
  std::vector<std::string> errors;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string where = "line " + std::to_string(lineno);
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back(where + ": malformed section header '" + line + "'");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!known_section(section)) {
        errors.push_back(where + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back(where + ": expected 'key = value', got '" + line + "'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      errors.push_back(where + ": key '" + key + "' outside of any section");
      continue;
    }
    if (!known_section(section)) continue;
    const Field* f = find_field(section, key);
    if (!f) {
      errors.push_back(where + ": unknown key '" + key + "' in [" + section + "]");
      continue;
    }
    if (!seen.insert(section + "." + key).second) {
      errors.push_back(where + ": duplicate key " + section + "." + key);
      continue;
    }
    apply(c, *f, value, where, errors);
  }

  for (const auto& ov : overrides) {
    const std::string where = "--set " + ov;
    const auto eq = ov.find('=');
    const auto dot = ov.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      errors.push_back(where + ": expected section.key=value");
      continue;
    }
    const std::string sec = trim(ov.substr(0, dot));
    const std::string key = trim(ov.substr(dot + 1, eq - dot - 1));
    const Field* f = find_field(sec, key);
    if (!f) {
      errors.push_back(where + ": unknown key " + sec + "." + key);
      continue;
    }
    apply(c, *f, ov.substr(eq + 1), where, errors);
  }
  if (!errors.empty()) throw ConfigError(errors);

  auto field_errors = validate_config(c);
  if (!field_errors.empty()) throw ConfigError(field_errors);
  return c;
}

ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides) {
  std::ifstream f(path);
  if (!f) throw ConfigError({path + ": cannot open config file"});
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return parse_config(ss.str(), overrides);
  } catch (const ConfigError& e) {
    std::vector<std::string> errs;
    for (const auto& msg : e.errors()) errs.push_back(path + ": " + msg);
    throw ConfigError(errs);
  }
}

std::string serialize_config(const ExperimentConfig& config) {
  std::string out;
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      if (!section.empty()) out += "\n";
      section = f.section;
      out += "[" + section + "]\n";
    }
    out += f.key + " = " + f.get(config) + "\n";
  }
  return out;
}

std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> e;
  auto err = [&e](const std::string& field, const std::string& msg) {
    e.push_back(field + ": " + msg);
  };

  if (c.id.empty() || c.id.find_first_of("/\\") != std::string::npos || c.id == "." ||
      c.id == "..") {
    err("experiment.id", "must be a plain non-empty name");
  }
  if (c.seeds < 1) err("experiment.seeds", "must be at least 1");
  if (c.T < 1) err("experiment.T", "must be at least 1");
  for (auto t : c.T_grid) {
    if (t < 1) err("experiment.T_grid", "entries must be at least 1");
  }
  if (c.jobs < 1) err("experiment.jobs", "must be at least 1");
  if (c.out.empty()) err("experiment.out", "must not be empty");

  static const std::set<std::string> problems = {"quadratic", "simplex_quadratic",
                                                 "nonconvex_ratio", "nonsmooth_quadratic"};
  static const std::set<std::string> geometries = {"euclidean", "ball", "simplex"};
  const bool known_problem = problems.count(c.problem) > 0;
  if (!known_problem) err("problem.kind", "unknown problem '" + c.problem + "'");
  if (!geometries.count(c.geometry)) err("problem.geometry", "unknown geometry '" + c.geometry + "'");
  if (c.dim < 1) err("problem.dim", "must be at least 1");
  auto check_len = [&](const Vector& v, const char* name) {
    if (!v.empty() && v.size() != c.dim) {
      err(std::string("problem.") + name,
          "expected " + std::to_string(c.dim) + " entries, got " + std::to_string(v.size()));
    }
    if (!all_finite(v)) err(std::string("problem.") + name, "entries must be finite");
  };
  check_len(c.center, "center");
  check_len(c.diag, "diag");
  check_len(c.shift, "shift");
  check_len(c.target, "target");
  check_len(c.x1, "x1");
  check_len(c.x0, "x0");
  for (double v : c.diag) {
    if (!(v > 0.0)) err("problem.diag", "entries must be positive");
  }
  if (c.geometry == "ball" && !(c.radius > 0.0 && std::isfinite(c.radius))) {
    err("problem.radius", "must be positive");
  }
  if (c.problem == "simplex_quadratic" && c.geometry != "simplex") {
    err("problem.geometry", "simplex_quadratic needs geometry = simplex");
  }
  if (c.geometry == "simplex" && known_problem && c.problem != "simplex_quadratic") {
    err("problem.geometry", "the simplex geometry is only available for simplex_quadratic");
  }
  if ((c.problem == "nonconvex_ratio" || c.problem == "nonsmooth_quadratic") &&
      c.geometry != "euclidean") {
    err("problem.geometry", c.problem + " needs geometry = euclidean");
  }
  if (!(c.weight >= 0.0 && std::isfinite(c.weight))) err("problem.weight", "must be nonnegative");
  if (c.g0 != "exact" && c.g0 != "estimate") err("problem.g0", "must be exact or estimate");
  if (c.g0_blocks < 1) err("problem.g0_blocks", "must be at least 1");
  if (c.g0_per_block < 1) err("problem.g0_per_block", "must be at least 1");

  static const std::set<std::string> noises = {"none", "two_point", "radial_pareto"};
  if (!noises.count(c.noise)) err("noise.kind", "unknown noise '" + c.noise + "'");
  if (!(c.p > 1.0 && c.p <= 2.0)) err("noise.p", "must lie in (1, 2] (got " + fmt_double(c.p) + ")");
  if (!(c.sigma >= 0.0 && std::isfinite(c.sigma))) err("noise.sigma", "must be finite and nonnegative");
  if (c.noise == "two_point" && !(c.q > 0.0 && c.q <= 1.0)) err("noise.q", "must lie in (0, 1]");
  if (c.noise == "radial_pareto") {
    if (!(c.tail > c.p)) err("noise.tail", "p-th moment would be infinite (need tail > p)");
    if (!(c.tail <= 2.0)) err("noise.tail", "must be at most 2");
    if (c.geometry == "simplex") err("noise.kind", "radial_pareto needs an l2 geometry");
  }

  const bool constant = c.schedule == "constant";
  std::optional<ScheduleMode> mode;
  if (!constant) {
    try {
      mode = parse_schedule_mode(c.schedule);
    } catch (const std::exception&) {
      err("schedule.mode", "unknown schedule '" + c.schedule + "'");
    }
  }
  if (mode) {
    const bool fits = (c.algorithm == Algorithm::Smd && is_smd(*mode)) ||
                      (c.algorithm == Algorithm::Asmd && is_asmd(*mode)) ||
                      ((c.algorithm == Algorithm::Sgd || c.algorithm == Algorithm::VanillaSgd) &&
                       is_sgd(*mode));
    if (!fits) {
      err("schedule.mode", to_string(*mode) + " does not fit algorithm " + to_string(c.algorithm));
    }
  }
  if (!(c.delta > 0.0 && c.delta < 1.0)) err("schedule.delta", "must lie in (0, 1)");
  if (!(c.c1 > 0.0)) err("schedule.c1", "must be positive");
  if (!(c.c2 > 0.0)) err("schedule.c2", "must be positive");
  if (c.grad1 && !(*c.grad1 >= 0.0)) err("schedule.grad1", "must be nonnegative");
  if (c.c_override && !(*c.c_override > 0.0)) err("schedule.c_override", "must be positive");
  if (!(c.eta_scale > 0.0 && std::isfinite(c.eta_scale))) err("schedule.eta_scale", "must be positive");
  if (c.lambda && !(*c.lambda > 0.0)) err("schedule.lambda", "must be positive");

  if ((c.algorithm == Algorithm::Sgd || c.algorithm == Algorithm::VanillaSgd) &&
      c.geometry != "euclidean") {
    err("problem.geometry", to_string(c.algorithm) + " needs geometry = euclidean");
  }

  // Step-size caps for fixed steps. L is known from the problem parameters.
  double L = 1.0;
  if (c.problem == "quadratic" && !c.diag.empty()) {
    L = *std::max_element(c.diag.begin(), c.diag.end());
  } else if (c.problem == "nonconvex_ratio") {
    L = 2.0;
  }
  auto check_eta = [&](const std::optional<double>& eta, const std::string& field, double cap,
                       const std::string& cap_text) {
    if (!eta) return;
    if (!(*eta > 0.0 && std::isfinite(*eta))) {
      err(field, "must be positive");
    } else if (*eta > cap * (1.0 + 1e-12)) {
      err(field, "exceeds the step-size cap " + cap_text + " = " + fmt_double(cap));
    }
  };
  if (constant) {
    if (!c.eta) err("schedule.eta", "required for the constant schedule");
    if (c.algorithm == Algorithm::Smd) check_eta(c.eta, "schedule.eta", 1.0 / (4.0 * L), "1/(4L)");
    if (c.algorithm == Algorithm::Asmd) check_eta(c.eta, "schedule.eta", 1.0 / (2.0 * L), "1/(2L)");
    if (c.algorithm == Algorithm::Sgd) check_eta(c.eta, "schedule.eta", 1.0 / L, "1/L");
  }
  if (c.algorithm == Algorithm::VanillaSgd) {
    if (!c.eta && !c.vanilla_eta) err("schedule.eta", "vanilla-sgd needs schedule.eta or compare.vanilla_eta");
    check_eta(c.eta, "schedule.eta", 1.0 / L, "1/L");
  }
  check_eta(c.vanilla_eta, "compare.vanilla_eta", 1.0 / L, "1/L");

  if (c.m < 2) err("diagnostics.m", "must be at least 2");
  if (c.lemma1_m < 2) err("diagnostics.lemma1_m", "must be at least 2");
  if (c.Q && !(*c.Q >= 1.0)) err("diagnostics.Q", "must be at least 1");
  return e;
}

std::vector<std::string> config_warnings(const ExperimentConfig& c) {
  std::vector<std::string> w;
  if (c.seeds < 30) w.push_back("experiment.seeds: fewer than 30 seeds, binomial intervals are wide");
  if ((c.martingale || c.lemma1) && c.m < 100) {
    w.push_back("diagnostics.m: fewer than 100 resamples, conditional moments are noisy");
  }
  if (c.schedule == "constant" || c.c_override || c.eta_scale != 1.0) {
    w.push_back("schedule: off-theorem settings, theorem bounds do not apply");
  }
  return w;
}

}  // namespace cliplab
