// lab: run experiments from a JSON config and compare finished runs.

#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cantorlab/pipeline.hpp"

using namespace cantorlab;

namespace {

int exit_code_for(const LabError& e) {
  switch (e.kind()) {
    case ErrorKind::kInvalidArgument: return 2;
    case ErrorKind::kNumerical: return 3;
    default: return 1;
  }
}

std::vector<std::string> split_keys(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, int workers, bool verbose) {
  try {
    ExperimentConfig cfg = load_config(config_path);
    apply_environment(cfg);
    RunOptions opt;
    if (!out_dir.empty()) opt.output = out_dir;
    opt.workers = workers;
    opt.verbose = verbose;
    opt.log = [](const std::string& m) { std::cerr << "lab: " << m << "\n"; };
    RunResult r = run_experiment(cfg, opt);
    if (r.exit_code != 0) {
      std::cerr << "lab: " << r.message << "\n";
    } else {
      std::cout << r.directory.string() << "\n";
      for (const auto& f : r.files) std::cout << "  " << f << "\n";
    }
    return r.exit_code;
  } catch (const LabError& e) {
    std::cerr << "lab: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "lab: " << e.what() << "\n";
    return 1;
  }
}

int cmd_compare(const std::string& a, const std::string& b, const std::string& keys) {
  try {
    PrecisionGuard guard(256);
    CompareReport rep = compare_runs(a, b, split_keys(keys));
    std::cout << rep.str();
    return 0;
  } catch (const LabError& e) {
    std::cerr << "lab: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "lab: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Potential theory and orthogonal polynomial experiments on generalized Julia sets"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the pipeline described by a JSON config");
  std::string config_path, out_dir;
  int workers = 1;
  bool verbose = false;
  run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", out_dir, "Output directory (overrides the config)");
  run->add_option("--workers", workers, "Worker cap")->check(CLI::PositiveNumber);
  run->add_flag("-v,--verbose", verbose, "Log stages to stderr");

  auto* cmp = app.add_subcommand("compare", "Compare the CSV products of two runs");
  std::string manifest_a, manifest_b, keys = "jacobi,widom2";
  cmp->add_option("manifest_a", manifest_a)->required()->check(CLI::ExistingFile);
  cmp->add_option("manifest_b", manifest_b)->required()->check(CLI::ExistingFile);
  cmp->add_option("--keys", keys, "Comma separated product keys");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (*run) return cmd_run(config_path, out_dir, workers, verbose);
  return cmd_compare(manifest_a, manifest_b, keys);
}
