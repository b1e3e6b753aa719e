#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tfi/config.hpp"
#include "tfi/runner.hpp"

namespace {

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::runtime_error("bad value '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::runtime_error("--values must list at least one number");
  return out;
}

void apply_env_seed(tfi::RunnerOptions& opts) {
  if (const char* env = std::getenv("TFI_SEED")) {
    opts.seed_override = true;
    opts.seed = std::stoull(env);
  }
}

void print_report(const tfi::RunSummary& summary) {
  for (const auto& o : summary.outcomes) {
    if (o.status == 2) {
      std::cout << o.id << ": ERROR: " << o.error << "\n";
      continue;
    }
    std::cout << o.id << ": " << (o.status == 0 ? "pass" : "FAIL") << "\n";
    for (const auto& c : o.report.checks)
      std::cout << "  " << (c.pass ? "  ok  " : " FAIL ") << c.name
                << "  lhs=" << c.lhs << " rhs=" << c.rhs << " slack=" << c.slack << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"temporal Fisher information speed-limit verifier"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", param, values_csv;
  int jobs = 1;

  auto* run = app.add_subcommand("run", "run every scenario in a config file");
  run->add_option("config", config_path, "scenario file (.toml or .json)")->required();
  run->add_option("--jobs", jobs, "scenarios to run concurrently");
  run->add_option("--out", out_dir, "output directory");

  auto* sweep = app.add_subcommand("sweep", "re-run one scenario over a parameter range");
  sweep->add_option("config", config_path, "scenario file with a single scenario")->required();
  sweep->add_option("--param", param, "dotted path into the scenario, e.g. dt or model.k")
      ->required();
  sweep->add_option("--values", values_csv, "comma-separated values")->required();
  sweep->add_option("--out", out_dir, "output directory");

  auto* list = app.add_subcommand("list-presets", "show the built-in model presets");

  CLI11_PARSE(app, argc, argv);

  try {
    tfi::RunnerOptions opts;
    opts.out_dir = out_dir;
    opts.jobs = jobs;
    apply_env_seed(opts);

    if (list->parsed()) {
      std::cout << tfi::preset_listing();
      return 0;
    }
    tfi::RunSummary summary;
    if (run->parsed()) {
      summary = tfi::run_scenarios(tfi::load_config_file(config_path), opts);
    } else {
      summary = tfi::run_sweep(tfi::load_config_document(config_path), param,
                               parse_values(values_csv), opts);
    }
    print_report(summary);
    return summary.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
