#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cgs/experiments/config.hpp"

namespace cgs::experiments {

// A pass/fail claim. Undeclared checks (no tol.<name> in the config) are
// reported but never fail the run.
struct Check {
  std::string name;
  double value = 0;
  std::string relation;  // "<=", "<", ">=", ">"
  std::optional<double> threshold;
  long long sample_size = 0;
  std::optional<double> std_error;
  bool passed = true;
};

// Rows of one CSV output; cells are preformatted.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct Report {
  std::string experiment;
  Config config;
  std::uint64_t seed = 0;
  nlohmann::json results = nlohmann::json::object();
  std::vector<Check> checks;
  std::map<std::string, Table> tables;

  bool passed() const;
  const Check* check(const std::string& name) const;
  nlohmann::json to_json() const;
};

Report run_growth(const ExperimentConfig& config);
Report run_diameter(const ExperimentConfig& config);
Report run_clt(const ExperimentConfig& config);
Report run_local(const ExperimentConfig& config);
Report run_distance(const ExperimentConfig& config);
Report run_profile(const ExperimentConfig& config);

const std::vector<std::string>& experiment_names();
// ConfigurationError for an unknown name.
Report run_experiment(const std::string& name, const ExperimentConfig& config);

// Writes <dir>/<experiment>.json and one <experiment>_<table>.csv per table.
// Returns the JSON path.
std::string write_report(const Report& report, const std::string& dir);

// Number formatting shared by reports and tables: shortest round-trip.
std::string format_number(double x);

}  // namespace cgs::experiments
