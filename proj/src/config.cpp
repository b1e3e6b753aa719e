#include "tfi/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "tfi/toml_lite.hpp"

namespace tfi {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& ctx, const std::string& msg) {
  throw std::runtime_error("config error [" + ctx + "]: " + msg);
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& ctx) {
  if (!obj.is_object()) bad(ctx, "expected a table");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) bad(ctx, "unknown field '" + it.key() + "'");
}

double get_num(const json& obj, const std::string& key, const std::string& ctx) {
  if (!obj.contains(key)) bad(ctx, "missing required field '" + key + "'");
  if (!obj[key].is_number()) bad(ctx, "field '" + key + "' must be a number");
  return obj[key].get<double>();
}

double get_num_or(const json& obj, const std::string& key, double fallback) {
  return obj.contains(key) ? obj[key].get<double>() : fallback;
}

std::string get_str(const json& obj, const std::string& key, const std::string& ctx) {
  if (!obj.contains(key) || !obj[key].is_string())
    bad(ctx, "missing or non-string field '" + key + "'");
  return obj[key].get<std::string>();
}

void validate_langevin_model(const json& m, const std::string& ctx) {
  check_keys(m, {"force", "k", "a", "b", "coeffs", "diffusion", "xmin", "xmax", "cells",
                 "boundary"},
             ctx + ".model");
  const std::string force = get_str(m, "force", ctx + ".model");
  std::set<std::string> needed;
  if (force == "ou") needed = {"k"};
  else if (force == "double_well") needed = {"a", "b"};
  else if (force == "zero") needed = {};
  else if (force == "polynomial") needed = {"coeffs"};
  else bad(ctx + ".model", "unknown force preset '" + force + "'");
  for (const auto& key : needed)
    if (!m.contains(key)) bad(ctx + ".model", "force '" + force + "' requires '" + key + "'");
  for (const auto& key : {"k", "a", "b", "coeffs"})
    if (m.contains(key) && !needed.count(key))
      bad(ctx + ".model", "field '" + std::string(key) + "' not valid for force '" + force + "'");
  if (!(get_num(m, "diffusion", ctx + ".model") > 0.0)) bad(ctx + ".model", "diffusion must be > 0");
  if (!(get_num(m, "xmax", ctx + ".model") > get_num(m, "xmin", ctx + ".model")))
    bad(ctx + ".model", "xmax must exceed xmin");
  if (get_num(m, "cells", ctx + ".model") < 2) bad(ctx + ".model", "cells must be >= 2");
  if (m.contains("boundary")) {
    const std::string b = m["boundary"].get<std::string>();
    if (b != "reflecting" && b != "periodic") bad(ctx + ".model", "unknown boundary '" + b + "'");
  }
}

void validate_matrix(const json& v, const std::string& ctx, bool complex_pairs) {
  if (!v.is_array() || v.empty()) bad(ctx, "expected a non-empty matrix (array of rows)");
  const std::size_t n = v.size();
  for (const auto& row : v) {
    if (!row.is_array() || row.size() != n) bad(ctx, "matrix must be square");
    for (const auto& e : row) {
      if (complex_pairs) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
          bad(ctx, "complex entries must be [re, im] pairs");
      } else if (!e.is_number()) {
        bad(ctx, "matrix entries must be numbers");
      }
    }
  }
}

void validate_markov_model(const json& m, const std::string& ctx) {
  check_keys(m, {"preset", "k12", "k21", "n", "forward", "backward", "rates"}, ctx + ".model");
  const bool has_preset = m.contains("preset");
  const bool has_rates = m.contains("rates");
  if (has_preset && has_rates) bad(ctx + ".model", "both preset and explicit rates given");
  if (!has_preset && !has_rates) bad(ctx + ".model", "need a preset or explicit rates");
  if (has_rates) {
    validate_matrix(m["rates"], ctx + ".model.rates", false);
    return;
  }
  const std::string preset = m["preset"].get<std::string>();
  if (preset == "two_state") {
    get_num(m, "k12", ctx + ".model");
    get_num(m, "k21", ctx + ".model");
  } else if (preset == "ring") {
    if (get_num(m, "n", ctx + ".model") < 3) bad(ctx + ".model", "ring needs n >= 3");
    get_num(m, "forward", ctx + ".model");
    get_num(m, "backward", ctx + ".model");
  } else {
    bad(ctx + ".model", "unknown preset '" + preset + "'");
  }
}

void validate_quantum_model(const json& m, const std::string& ctx) {
  check_keys(m, {"preset", "g", "omega_s", "omega_e", "dim_e", "dim_s", "h_s", "h_e", "h_se",
                 "rho_se"},
             ctx + ".model");
  const bool has_preset = m.contains("preset");
  const bool has_explicit = m.contains("h_se");
  if (has_preset && has_explicit) bad(ctx + ".model", "both preset and explicit matrices given");
  if (!has_preset && !has_explicit) bad(ctx + ".model", "need a preset or explicit matrices");
  if (has_preset) {
    const std::string preset = m["preset"].get<std::string>();
    if (preset == "two_qubit_xx") {
      get_num(m, "g", ctx + ".model");
    } else if (preset == "qubit_env") {
      get_num(m, "g", ctx + ".model");
      get_num(m, "omega_s", ctx + ".model");
      get_num(m, "omega_e", ctx + ".model");
      get_num(m, "dim_e", ctx + ".model");
    } else {
      bad(ctx + ".model", "unknown preset '" + preset + "'");
    }
    return;
  }
  for (const auto& key : {"dim_s", "dim_e"}) get_num(m, key, ctx + ".model");
  for (const auto& key : {"h_s", "h_e", "h_se", "rho_se"}) {
    if (!m.contains(key)) bad(ctx + ".model", "missing matrix '" + std::string(key) + "'");
    validate_matrix(m[key], ctx + ".model." + key, true);
  }
}

void validate_nh_model(const json& m, const std::string& ctx) {
  check_keys(m, {"preset", "g", "omega", "matrix"}, ctx + ".model");
  const bool has_preset = m.contains("preset");
  const bool has_matrix = m.contains("matrix");
  if (has_preset && has_matrix) bad(ctx + ".model", "both preset and explicit matrix given");
  if (!has_preset && !has_matrix) bad(ctx + ".model", "need a preset or explicit matrix");
  if (has_matrix) {
    validate_matrix(m["matrix"], ctx + ".model.matrix", true);
    return;
  }
  const std::string preset = m["preset"].get<std::string>();
  if (preset == "diag_decay") {
    get_num(m, "g", ctx + ".model");
  } else if (preset == "pt_like") {
    get_num(m, "omega", ctx + ".model");
    get_num(m, "g", ctx + ".model");
  } else {
    bad(ctx + ".model", "unknown preset '" + preset + "'");
  }
}

void validate_initial(const std::string& kind, const json& s, const std::string& ctx) {
  if (kind == "open_quantum") {
    if (s.contains("initial")) bad(ctx, "open_quantum scenarios take rho_se from the model");
    return;
  }
  if (!s.contains("initial")) bad(ctx, "missing required table 'initial'");
  const json& ini = s["initial"];
  const std::string type = get_str(ini, "type", ctx + ".initial");
  if (kind == "langevin") {
    if (type == "gaussian") {
      check_keys(ini, {"type", "mean", "variance"}, ctx + ".initial");
      if (!(get_num(ini, "variance", ctx + ".initial") > 0.0))
        bad(ctx + ".initial", "variance must be > 0");
    } else if (type == "uniform") {
      check_keys(ini, {"type"}, ctx + ".initial");
    } else if (type == "indicator") {
      check_keys(ini, {"type", "lo", "hi"}, ctx + ".initial");
      if (!(get_num(ini, "hi", ctx + ".initial") > get_num(ini, "lo", ctx + ".initial")))
        bad(ctx + ".initial", "need hi > lo");
    } else {
      bad(ctx + ".initial", "unknown initial type '" + type + "'");
    }
  } else if (kind == "markov") {
    if (type == "delta") {
      check_keys(ini, {"type", "index"}, ctx + ".initial");
      get_num(ini, "index", ctx + ".initial");
    } else if (type == "explicit") {
      check_keys(ini, {"type", "probs"}, ctx + ".initial");
      if (!ini.contains("probs") || !ini["probs"].is_array())
        bad(ctx + ".initial", "missing probability array 'probs'");
    } else {
      bad(ctx + ".initial", "unknown initial type '" + type + "'");
    }
  } else if (kind == "non_hermitian") {
    if (type == "maximally_mixed") {
      check_keys(ini, {"type", "dim"}, ctx + ".initial");
    } else if (type == "basis") {
      check_keys(ini, {"type", "index", "dim"}, ctx + ".initial");
      get_num(ini, "index", ctx + ".initial");
    } else if (type == "explicit") {
      check_keys(ini, {"type", "matrix"}, ctx + ".initial");
      validate_matrix(ini["matrix"], ctx + ".initial.matrix", true);
    } else {
      bad(ctx + ".initial", "unknown initial type '" + type + "'");
    }
  }
}

ScenarioConfig parse_scenario(const json& s, std::size_t index) {
  const std::string ctx =
      s.contains("id") && s["id"].is_string() ? s["id"].get<std::string>()
                                              : "scenario #" + std::to_string(index + 1);
  check_keys(s, {"id", "kind", "tau", "dt", "t0", "seed", "record_stride", "tolerances", "model",
                 "initial", "path_fisher"},
             ctx);
  ScenarioConfig cfg;
  cfg.id = get_str(s, "id", ctx);
  cfg.kind = get_str(s, "kind", ctx);
  if (cfg.kind != "langevin" && cfg.kind != "markov" && cfg.kind != "open_quantum" &&
      cfg.kind != "non_hermitian")
    bad(ctx, "unknown kind '" + cfg.kind + "'");
  cfg.tau = get_num(s, "tau", ctx);
  cfg.dt = get_num(s, "dt", ctx);
  if (!(cfg.tau > 0.0)) bad(ctx, "tau must be > 0");
  if (!(cfg.dt > 0.0)) bad(ctx, "dt must be > 0");
  if (s.contains("t0")) {
    if (cfg.kind == "open_quantum" || cfg.kind == "non_hermitian")
      bad(ctx, "t0 applies to langevin and markov scenarios only");
    cfg.t0 = s["t0"].get<double>();
    if (!(cfg.t0 >= 0.0)) bad(ctx, "t0 must be >= 0");
    if (!(cfg.tau > cfg.t0)) bad(ctx, "tau must exceed t0");
  }
  if (s.contains("seed")) cfg.seed = s["seed"].get<std::uint64_t>();
  if (s.contains("record_stride")) cfg.record_stride = s["record_stride"].get<std::size_t>();
  if (s.contains("tolerances")) {
    const json& t = s["tolerances"];
    check_keys(t, {"pointwise_rel", "pointwise_abs", "integrated", "mc_sigmas"},
               ctx + ".tolerances");
    cfg.tol.pointwise_rel = get_num_or(t, "pointwise_rel", cfg.tol.pointwise_rel);
    cfg.tol.pointwise_abs = get_num_or(t, "pointwise_abs", cfg.tol.pointwise_abs);
    cfg.tol.integrated = get_num_or(t, "integrated", cfg.tol.integrated);
    cfg.tol.mc_sigmas = get_num_or(t, "mc_sigmas", cfg.tol.mc_sigmas);
    for (double v : {cfg.tol.pointwise_rel, cfg.tol.pointwise_abs, cfg.tol.integrated})
      if (!(v > 0.0)) bad(ctx + ".tolerances", "tolerances must be positive");
  }
  if (s.contains("path_fisher")) {
    if (cfg.kind != "langevin") bad(ctx, "path_fisher applies to langevin scenarios only");
    const json& pf = s["path_fisher"];
    check_keys(pf, {"enabled", "n_trajectories", "dt"}, ctx + ".path_fisher");
    cfg.path_fisher.enabled = pf.value("enabled", true);
    cfg.path_fisher.n_trajectories =
        static_cast<std::size_t>(get_num_or(pf, "n_trajectories", 100000));
    cfg.path_fisher.dt = get_num_or(pf, "dt", cfg.dt);
  }

  if (!s.contains("model")) bad(ctx, "missing required table 'model'");
  if (cfg.kind == "langevin") validate_langevin_model(s["model"], ctx);
  else if (cfg.kind == "markov") validate_markov_model(s["model"], ctx);
  else if (cfg.kind == "open_quantum") validate_quantum_model(s["model"], ctx);
  else validate_nh_model(s["model"], ctx);
  validate_initial(cfg.kind, s, ctx);

  cfg.model = s["model"];
  if (s.contains("initial")) cfg.initial = s["initial"];
  return cfg;
}

}  // namespace

std::vector<ScenarioConfig> parse_config(const json& root) {
  if (!root.is_object()) throw std::runtime_error("config error: top level must be a table");
  for (auto it = root.begin(); it != root.end(); ++it)
    if (it.key() != "scenario")
      throw std::runtime_error("config error: unknown top-level field '" + it.key() + "'");
  std::vector<ScenarioConfig> out;
  if (!root.contains("scenario")) return out;
  const json& arr = root["scenario"];
  if (!arr.is_array()) throw std::runtime_error("config error: 'scenario' must be an array");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(parse_scenario(arr[i], i));
    if (!ids.insert(out.back().id).second)
      throw std::runtime_error("config error: duplicate scenario id '" + out.back().id + "'");
  }
  return out;
}

std::vector<ScenarioConfig> parse_config_text(const std::string& text, bool toml) {
  return parse_config(toml ? parse_toml_lite(text) : json::parse(text));
}

nlohmann::json load_config_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const bool toml = path.size() >= 5 && path.compare(path.size() - 5, 5, ".toml") == 0;
  const bool jsonext = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  if (!toml && !jsonext)
    throw std::runtime_error("config file must end in .toml or .json: " + path);
  return toml ? parse_toml_lite(ss.str()) : json::parse(ss.str());
}

std::vector<ScenarioConfig> load_config_file(const std::string& path) {
  return parse_config(load_config_document(path));
}

void set_by_dotted_path(nlohmann::json& obj, const std::string& path, const nlohmann::json& value) {
  json* cur = &obj;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string part = path.substr(start, dot - start);
    if (part.empty()) throw std::runtime_error("empty component in parameter path '" + path + "'");
    if (dot == std::string::npos) {
      (*cur)[part] = value;
      return;
    }
    if (!cur->contains(part) || !(*cur)[part].is_object())
      throw std::runtime_error("parameter path '" + path + "' does not address the config");
    cur = &(*cur)[part];
    start = dot + 1;
  }
}

std::string preset_listing() {
  return "langevin forces:   ou{k}  double_well{a,b}  zero  polynomial{coeffs}\n"
         "markov models:     two_state{k12,k21}  ring{n,forward,backward}  explicit rates\n"
         "open_quantum:      two_qubit_xx{g}  qubit_env{g,omega_s,omega_e,dim_e}  explicit matrices\n"
         "non_hermitian:     diag_decay{g}  pt_like{omega,g}  explicit matrix\n";
}

}  // namespace tfi
