#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cliplab/algorithms.hpp"
#include "cliplab/vector.hpp"

namespace cliplab {

/// Raised for malformed or invalid experiment configs. `errors()` holds one
/// "<where>: <message>" entry per problem found.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

/// Experiment description. Text form:
///
///   # comment
///   [section]
///   key = value
///
/// Lists are comma separated. Keys are unique per section; unknown sections
/// and keys are errors. Overrides use "section.key=value".
struct ExperimentConfig {
  // [experiment]
  std::string id = "experiment";
  Algorithm algorithm = Algorithm::Smd;
  std::size_t seeds = 100;
  std::uint64_t base_seed = 1;
  std::size_t T = 1000;
  std::vector<std::size_t> T_grid;
  std::size_t jobs = 1;
  std::string out = "results";

  // [problem]
  std::string problem = "quadratic";
  std::size_t dim = 2;
  std::string geometry = "euclidean";
  double radius = 1.0;
  Vector center;
  Vector diag;
  Vector shift;
  Vector target;
  double weight = 0.5;
  Vector x1;
  Vector x0;
  std::string g0 = "exact";
  std::size_t g0_blocks = 51;
  std::size_t g0_per_block = 20;

  // [noise]
  std::string noise = "none";
  double p = 2.0;
  double sigma = 0.0;
  double q = 0.01;
  double tail = 2.0;

  // [schedule]
  std::string schedule = "smd_known_T";
  double delta = 0.1;
  double c1 = 1.0;
  double c2 = 1.0;
  std::optional<double> grad1;
  std::optional<double> c_override;
  double eta_scale = 1.0;
  std::optional<double> eta;
  std::optional<double> lambda;

  // [diagnostics]
  bool pathwise = false;
  bool lemma1 = false;
  bool martingale = false;
  std::size_t m = 200;
  std::size_t lemma1_m = 100000;
  std::optional<double> Q;

  // [compare]
  std::optional<double> vanilla_eta;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses text; throws ConfigError with "line N" diagnostics for syntax
/// problems and with "section.key" diagnostics for invalid values.
ExperimentConfig parse_config(const std::string& text,
                              const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides = {});

/// Canonical text; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

/// Re-checks every constraint; returns the list of field errors.
std::vector<std::string> validate_config(const ExperimentConfig& config);

/// Non-fatal notes (e.g. few seeds).
std::vector<std::string> config_warnings(const ExperimentConfig& config);

}  // namespace cliplab
