#pragma once

// Config-driven experiment runs and run comparison.

#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cantorlab/io.hpp"

namespace cantorlab {

/// Products in dependency order.
const std::vector<std::string>& known_products();

struct ExperimentConfig {
  GammaSpec gamma = GammaSpec::constant(Rational(1, 8));
  TowerVariant variant = TowerVariant::kKGamma;
  int levels = 4;
  std::optional<int> m;  // quadrature base size; default from N
  int n = 64;            // recurrence coefficients requested
  unsigned precision = 256;
  std::string precision_source = "default";
  std::set<std::string> products;
  std::string output = "lab-output";

  Real green_tol = Real("1e-10");
  Real cross_level_tol = Real("1e-8");
  std::optional<Rational> c;
  std::vector<Real> green_points;
  std::vector<Real> cdf_points;
  std::vector<Real> modulus_deltas;
  int modulus_samples = 64;
  std::vector<int> chebyshev_degrees;
  int chebyshev_density = 32;
  std::vector<int> markov_degrees;
  int markov_density = 64;
  int ap_k_max = 32;
  std::vector<Real> ap_eps = default_eps_grid();

  Json raw;  // the parsed document, echoed into the manifest
};

/// Throws LabError(kInvalidArgument) naming the offending field.
ExperimentConfig parse_config(const Json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
/// LAB_PRECISION_BITS replaces the configured precision when set.
void apply_environment(ExperimentConfig& config);
/// Requested products plus everything they need.
std::set<std::string> resolve_products(const std::set<std::string>& requested);

struct RunOptions {
  std::optional<std::string> output;  // overrides config.output
  int workers = 1;
  bool verbose = false;
  std::function<void(const std::string&)> log;
};

struct RunResult {
  int exit_code = 0;  // 0 ok, 2 invalid config, 3 numerical failure
  std::string message;
  std::filesystem::path directory;
  std::vector<std::string> files;
};

RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

struct CompareColumn {
  std::string key;
  std::string column;
  int rows = 0;
  Real max_abs = 0;
  Real max_rel = 0;
};

struct CompareReport {
  std::vector<std::string> warnings;
  std::vector<CompareColumn> columns;
  std::string str() const;
};

/// Rows are matched on the first column; for keys with a trusted flag only
/// rows trusted in both runs count. `max_rows` < 0 compares every match.
CompareReport compare_runs(const std::filesystem::path& manifest_a, const std::filesystem::path& manifest_b,
                           const std::vector<std::string>& keys, int max_rows = -1);

}  // namespace cantorlab
