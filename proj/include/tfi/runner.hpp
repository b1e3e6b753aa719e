#ifndef TFI_RUNNER_HPP
#define TFI_RUNNER_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "tfi/config.hpp"
#include "tfi/info_geometry.hpp"

namespace tfi {

struct RunnerOptions {
  std::string out_dir = "out";
  int jobs = 1;             // scenario-level parallelism
  bool seed_override = false;
  std::uint64_t seed = 0;   // used when seed_override is set
};

// status: 0 all checks passed, 1 at least one check violated, 2 runtime
// error (error holds the message, report is empty).
struct ScenarioOutcome {
  std::string id;
  std::string kind;
  int status = 0;
  std::string error;
  double wall_seconds = 0.0;
  std::string csv_file;  // relative to out_dir
  VerificationReport report;
};

struct RunSummary {
  std::vector<ScenarioOutcome> outcomes;
  // 0: every scenario passed; 1: some check violated; 2: some scenario
  // failed to run at all.
  int exit_code() const;
};

// Runs every scenario, writing <id>.csv per scenario plus summary.json
// into out_dir.  A scenario that throws is reported with status 2 and
// does not abort its siblings.
RunSummary run_scenarios(const std::vector<ScenarioConfig>& scenarios,
                         const RunnerOptions& opts);

// One scenario in-process, no files.  Exposed for tests.
ScenarioOutcome run_one_scenario(const ScenarioConfig& cfg,
                                 const RunnerOptions& opts,
                                 std::vector<std::string>* csv_lines = nullptr);

// Re-runs the document with `param` (dotted path into the single
// scenario) set to each value in turn; writes sweep.csv with one row per
// value carrying the slack of every check, plus summary.json.
RunSummary run_sweep(const nlohmann::json& document, const std::string& param,
                     const std::vector<double>& values, const RunnerOptions& opts);

nlohmann::json summary_json(const RunSummary& summary);

}  // namespace tfi

#endif
