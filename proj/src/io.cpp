#include "cliplab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>

namespace cliplab {

namespace {

using nlohmann::ordered_json;

ordered_json num(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

bool plain_component(const std::string& s) {
  if (s.empty() || s == "." || s == "..") return false;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  out += "\r\n";
  return out;
}

std::string seed_results_csv(const TrialSummary& s) {
  std::string out = "# schema=1\r\n";
  out += csv_row({"seed", "algorithm", "schedule", "p", "T", "summary", "final_gap", "bound",
                  "exceeds_bound", "clip_fraction", "steps", "diverged", "pathwise_violations",
                  "pathwise_max_margin", "config_digest"});
  for (const auto& r : s.seeds) {
    const bool exceeds = !std::isnan(s.bound) && r.summary > s.bound;
    out += csv_row({std::to_string(r.seed), to_string(s.algorithm), s.schedule, format_double(s.p),
                    std::to_string(s.T), format_double(r.summary), format_double(r.final_gap),
                    format_double(s.bound), exceeds ? "1" : "0", format_double(r.clip_fraction),
                    std::to_string(r.steps), r.diverged ? "1" : "0",
                    std::to_string(r.pathwise_violations), format_double(r.pathwise_max_margin),
                    s.digest});
  }
  return out;
}

std::string summary_json(const TrialSummary& s) {
  ordered_json j;
  j["kind"] = "trial_summary";
  j["config_digest"] = s.digest;
  j["algorithm"] = to_string(s.algorithm);
  j["schedule"] = s.schedule;
  j["p"] = s.p;
  j["T"] = s.T;
  j["N"] = s.N;
  j["delta"] = s.delta;
  j["median"] = num(s.median);
  j["upper_quantile"] = num(s.upper_quantile);
  j["bound"] = num(s.bound);
  j["failures"] = s.failures;
  j["failure_rate"] = s.failure_rate;
  j["failure_stderr"] = s.failure_stderr;
  j["mean_clip_fraction"] = s.mean_clip_fraction;
  j["diverged"] = s.diverged;
  j["warnings"] = s.warnings;
  return j.dump();
}

std::string rate_fit_json(const RateFit& f) {
  ordered_json j;
  j["kind"] = "rate_fit";
  j["T"] = f.T;
  std::vector<ordered_json> metric;
  for (double m : f.metric) metric.push_back(num(m));
  j["median_metric"] = metric;
  j["slope"] = num(f.slope);
  j["intercept"] = num(f.intercept);
  j["r_squared"] = num(f.r_squared);
  j["theoretical"] = num(f.theoretical);
  j["deviation"] = num(f.deviation);
  return j.dump();
}

std::string compare_json(const CompareReport& r) {
  ordered_json j;
  j["kind"] = "compare";
  j["T"] = r.T;
  j["N"] = r.N;
  j["vanilla_eta"] = r.vanilla_eta;
  j["clipped_median"] = num(r.clipped_median);
  j["vanilla_median"] = num(r.vanilla_median);
  j["clipped_upper"] = num(r.clipped_upper);
  j["vanilla_upper"] = num(r.vanilla_upper);
  j["ratio"] = num(r.ratio);
  j["clipped_diverged"] = r.clipped_diverged;
  j["vanilla_diverged"] = r.vanilla_diverged;
  j["clipped_wins"] = r.clipped_wins;
  j["ties"] = r.ties;
  return j.dump();
}

std::string conditions_json(const std::string& schedule, const ConditionReport& report) {
  ordered_json j;
  j["kind"] = "proposition_conditions";
  j["schedule"] = schedule;
  j["passed"] = report.all_passed();
  std::vector<ordered_json> rows;
  for (const auto& c : report.conditions) {
    ordered_json r;
    r["name"] = c.name;
    r["passed"] = c.passed;
    r["vacuous"] = c.vacuous;
    r["lhs"] = num(c.lhs);
    r["rhs"] = num(c.rhs);
    r["margin"] = num(c.margin);
    rows.push_back(r);
  }
  j["conditions"] = rows;
  return j.dump();
}

std::string check_json(const CheckReport& c) {
  ordered_json j;
  j["kind"] = "check";
  j["name"] = c.name;
  j["passed"] = c.passed();
  j["applicable"] = c.applicable;
  j["steps"] = c.steps;
  j["violations"] = c.violations;
  j["max_margin"] = num(c.max_margin);
  j["std_error"] = num(c.std_error);
  j["note"] = c.note;
  return j.dump();
}

std::filesystem::path result_dir(const std::filesystem::path& out, const std::string& id,
                                 Algorithm algorithm, double p) {
  if (!plain_component(id)) {
    throw DomainError("experiment.id: must be a plain name ([A-Za-z0-9_.-], not '.' or '..')");
  }
  return out / id / to_string(algorithm) / p_label(p);
}

void write_file(const std::filesystem::path& root, const std::filesystem::path& path,
                const std::string& text, bool append) {
  namespace fs = std::filesystem;
  const fs::path r = fs::weakly_canonical(fs::absolute(root));
  const fs::path target = fs::weakly_canonical(fs::absolute(path));
  auto [rit, tit] = std::mismatch(r.begin(), r.end(), target.begin(), target.end());
  if (rit != r.end()) {
    throw DomainError("output: refusing to write outside " + r.string());
  }
  fs::create_directories(target.parent_path());
  std::ofstream f(target, std::ios::binary | (append ? std::ios::app : std::ios::trunc));
  if (!f) throw std::runtime_error("output: cannot open " + target.string());
  f << text;
  if (!f) throw std::runtime_error("output: write failed for " + target.string());
}

}  // namespace cliplab
