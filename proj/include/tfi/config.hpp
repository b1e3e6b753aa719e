#ifndef TFI_CONFIG_HPP
#define TFI_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace tfi {

struct Tolerances {
  double pointwise_rel = 1e-6;
  double pointwise_abs = 1e-9;
  double integrated = 1e-4;
  double mc_sigmas = 3.0;
};

struct PathFisherConfig {
  bool enabled = false;
  std::size_t n_trajectories = 100000;
  double dt = 1e-3;  // defaults to the scenario dt when unset
};

// A validated scenario; `model` and `initial` keep the kind-specific
// (already schema-checked) parameters.
struct ScenarioConfig {
  std::string id;
  std::string kind;  // langevin | markov | open_quantum | non_hermitian
  double tau = 0.0;
  double dt = 0.0;
  double t0 = -1.0;  // < 0: module default (10*dt where applicable)
  std::uint64_t seed = 1;
  std::size_t record_stride = 0;  // 0: automatic
  Tolerances tol;
  PathFisherConfig path_fisher;
  nlohmann::json model;
  nlohmann::json initial;
};

// Strict parsing: unknown fields are rejected with the offending key.
std::vector<ScenarioConfig> parse_config(const nlohmann::json& root);
std::vector<ScenarioConfig> parse_config_text(const std::string& text, bool toml);
// Format detected by extension (.toml vs .json).
std::vector<ScenarioConfig> load_config_file(const std::string& path);

// Raw document access, used by `sweep` to override a parameter before
// re-validation.
nlohmann::json load_config_document(const std::string& path);
void set_by_dotted_path(nlohmann::json& obj, const std::string& path, const nlohmann::json& value);

std::string preset_listing();

}  // namespace tfi

#endif
