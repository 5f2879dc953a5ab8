#pragma once

#include <string>
#include <vector>

#include <json.hpp>

// Verification experiments driven by a JSON config. Each run is deterministic in
// (config, master seed): every random stream is derived from the "seed" field.
namespace mollify::experiments {

using json = nlohmann::json;

struct CsvFile {
  std::string name;
  std::string content;
};

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentResult {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string config_hash;
  json summary;
  std::vector<CsvFile> files;
  std::vector<Assertion> assertions;

  bool passed() const;
  /// summary.json contents, including the assertion list.
  json report() const;
};

/// Names accepted in the "experiment" field.
const std::vector<std::string>& experiment_names();

/// Runs config["experiment"]. Throws ConfigError (or a module error) for invalid input.
ExperimentResult run(const json& config);

ExperimentResult verify_mollification(const json& config);
ExperimentResult verify_expectation(const json& config);
ExperimentResult verify_concentration(const json& config);
ExperimentResult verify_linf(const json& config);
ExperimentResult verify_maurey(const json& config);
ExperimentResult simulate_mrac(const json& config);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mollify::experiments
