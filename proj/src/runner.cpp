#include "tfi/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "tfi/langevin.hpp"
#include "tfi/markov.hpp"
#include "tfi/non_hermitian.hpp"
#include "tfi/quantum.hpp"

namespace tfi {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

std::size_t auto_stride(double tau, double dt, std::size_t requested) {
  if (requested > 0) return requested;
  const auto n_steps = static_cast<std::size_t>(std::ceil(tau / dt));
  return std::max<std::size_t>(1, n_steps / 2000);
}

quantum::cmat parse_cmat(const json& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  quantum::cmat m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const json& e = rows[i][j];
      m(i, j) = std::complex<double>(e[0].get<double>(), e[1].get<double>());
    }
  return m;
}

// --- langevin -------------------------------------------------------------

langevin::LangevinModel build_langevin_model(const json& m) {
  langevin::LangevinModel model;
  const std::string force = m["force"].get<std::string>();
  if (force == "ou") model.force = langevin::make_force_ou(m["k"].get<double>());
  else if (force == "double_well")
    model.force = langevin::make_force_double_well(m["a"].get<double>(), m["b"].get<double>());
  else if (force == "zero") model.force = langevin::make_force_zero();
  else model.force = langevin::make_force_polynomial(m["coeffs"].get<std::vector<double>>());
  model.diffusion = m["diffusion"].get<double>();

  const double xmin = m["xmin"].get<double>();
  const double xmax = m["xmax"].get<double>();
  const auto cells = static_cast<std::size_t>(m["cells"].get<double>());
  model.grid.origin = {xmin};
  model.grid.spacing = {(xmax - xmin) / static_cast<double>(cells)};
  model.grid.shape = {cells};
  model.grid.boundary = m.value("boundary", std::string("reflecting")) == "periodic"
                            ? Boundary::periodic
                            : Boundary::reflecting;
  return model;
}

GridDensity build_langevin_initial(const GridSpec& grid, const json& ini) {
  const std::string type = ini["type"].get<std::string>();
  if (type == "gaussian")
    return gaussian_density_1d(grid, ini["mean"].get<double>(), ini["variance"].get<double>());
  if (type == "uniform") return uniform_density(grid);
  return indicator_density_1d(grid, ini["lo"].get<double>(), ini["hi"].get<double>());
}

void run_langevin(const ScenarioConfig& cfg, std::uint64_t seed, VerificationReport& report,
                  std::vector<std::string>* csv) {
  const auto model = build_langevin_model(cfg.model);
  const auto initial = build_langevin_initial(model.grid, cfg.initial);

  langevin::LangevinRunOptions opts;
  opts.tau = cfg.tau;
  opts.dt = cfg.dt;
  opts.t0 = cfg.t0;
  opts.record_stride = auto_stride(cfg.tau, cfg.dt, cfg.record_stride);
  opts.pointwise_rel_tol = cfg.tol.pointwise_rel;
  opts.pointwise_abs_tol = cfg.tol.pointwise_abs;
  opts.integrated_tol = cfg.tol.integrated;

  auto res = run_langevin_experiment(model, initial, opts);
  report = res.report;

  if (cfg.path_fisher.enabled) {
    langevin::PathFisherOptions pf;
    pf.t = cfg.tau;
    pf.dt = cfg.path_fisher.dt;
    pf.n_traj = cfg.path_fisher.n_trajectories;
    pf.seed = seed;
    const auto est = path_fisher_mc(model, initial, pf);
    const double target = 0.5 * res.entropy.back();
    CheckResult c;
    c.name = "path_fisher_identity";
    c.lhs = est.estimate;
    c.rhs = target;
    c.tolerance = cfg.tol.mc_sigmas * est.std_error;
    c.slack = c.tolerance - std::abs(c.lhs - c.rhs);
    c.pass = std::isfinite(c.slack) && c.slack >= 0.0;
    report.add(c);
    report.note("path_fisher_std_error", est.std_error);
  }

  if (csv) {
    csv->push_back("t,entropy,fisher,lambda,fisher_length,bound_length");
    const auto& s = res.series;
    for (std::size_t i = 0; i < s.size(); ++i)
      csv->push_back(fmt_g(s.times()[i]) + "," + fmt_g(res.entropy[i]) + "," +
                     fmt_g(s.fisher()[i]) + "," + fmt_g(s.bound()[i]) + "," +
                     fmt_g(s.fisher_length()[i]) + "," + fmt_g(s.bound_length()[i]));
  }
}

// --- markov ---------------------------------------------------------------

markov::MarkovModel build_markov_model(const json& m) {
  if (m.contains("rates")) {
    const auto n = static_cast<Eigen::Index>(m["rates"].size());
    Eigen::MatrixXd w(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) w(i, j) = m["rates"][i][j].get<double>();
    return markov::MarkovModel(w);
  }
  const std::string preset = m["preset"].get<std::string>();
  if (preset == "two_state")
    return markov::MarkovModel::two_state(m["k12"].get<double>(), m["k21"].get<double>());
  return markov::MarkovModel::ring(static_cast<int>(m["n"].get<double>()),
                                   m["forward"].get<double>(), m["backward"].get<double>());
}

DiscreteDistribution build_markov_initial(int dim, const json& ini) {
  const std::string type = ini["type"].get<std::string>();
  if (type == "delta") {
    const auto idx = static_cast<std::size_t>(ini["index"].get<double>());
    if (idx >= static_cast<std::size_t>(dim))
      throw std::runtime_error("initial delta index out of range");
    std::vector<double> p(static_cast<std::size_t>(dim), 0.0);
    p[idx] = 1.0;
    return DiscreteDistribution(std::move(p));
  }
  return DiscreteDistribution(ini["probs"].get<std::vector<double>>());
}

void run_markov(const ScenarioConfig& cfg, VerificationReport& report,
                std::vector<std::string>* csv) {
  const auto model = build_markov_model(cfg.model);
  const auto initial = build_markov_initial(model.dim(), cfg.initial);

  markov::MarkovRunOptions opts;
  opts.tau = cfg.tau;
  opts.dt = cfg.dt;
  opts.t0 = cfg.t0;
  opts.record_stride = auto_stride(cfg.tau, cfg.dt, cfg.record_stride);
  opts.pointwise_rel_tol = cfg.tol.pointwise_rel;
  opts.pointwise_abs_tol = cfg.tol.pointwise_abs;
  opts.integrated_tol = cfg.tol.integrated;

  auto res = run_markov_experiment(model, initial, opts);
  report = res.report;

  if (csv) {
    csv->push_back(
        "t,entropy,pseudo_entropy,activity,fisher,lambda_ep,lambda_activity,"
        "fisher_length,bound_length_ep,bound_length_activity");
    const auto& e = res.ep_series;
    const auto& a = res.activity_series;
    for (std::size_t i = 0; i < e.size(); ++i)
      csv->push_back(fmt_g(e.times()[i]) + "," + fmt_g(res.entropy[i]) + "," +
                     fmt_g(res.pseudo_entropy[i]) + "," + fmt_g(res.activity[i]) + "," +
                     fmt_g(e.fisher()[i]) + "," + fmt_g(e.bound()[i]) + "," +
                     fmt_g(a.bound()[i]) + "," + fmt_g(e.fisher_length()[i]) + "," +
                     fmt_g(e.bound_length()[i]) + "," + fmt_g(a.bound_length()[i]));
  }
}

// --- open quantum ---------------------------------------------------------

quantum::CompositeSystem build_quantum_system(const json& m) {
  if (m.contains("preset")) {
    const std::string preset = m["preset"].get<std::string>();
    if (preset == "two_qubit_xx") return quantum::make_two_qubit_xx(m["g"].get<double>());
    return quantum::make_qubit_env(m["g"].get<double>(), m["omega_s"].get<double>(),
                                   m["omega_e"].get<double>(),
                                   static_cast<int>(m["dim_e"].get<double>()));
  }
  quantum::CompositeSystem sys;
  sys.dim_s = static_cast<int>(m["dim_s"].get<double>());
  sys.dim_e = static_cast<int>(m["dim_e"].get<double>());
  sys.h_s = parse_cmat(m["h_s"]);
  sys.h_e = parse_cmat(m["h_e"]);
  sys.h_se = parse_cmat(m["h_se"]);
  sys.rho_se = parse_cmat(m["rho_se"]);
  sys.validate();
  return sys;
}

void run_quantum(const ScenarioConfig& cfg, VerificationReport& report,
                 std::vector<std::string>* csv) {
  const auto sys = build_quantum_system(cfg.model);

  quantum::QuantumRunOptions opts;
  opts.tau = cfg.tau;
  opts.dt = cfg.dt;
  opts.record_stride = auto_stride(cfg.tau, cfg.dt, cfg.record_stride);
  opts.pointwise_rel_tol = cfg.tol.pointwise_rel;
  opts.pointwise_abs_tol = cfg.tol.pointwise_abs;
  opts.integrated_tol = cfg.tol.integrated;

  auto res = run_open_quantum_experiment(sys, opts);
  report = res.report;

  if (csv) {
    std::string header = "t,fisher,lambda,fisher_length,bound_length,purity";
    for (int i = 0; i < sys.dim_s; ++i) header += ",p_" + std::to_string(i);
    csv->push_back(header);
    const auto& s = res.series;
    for (std::size_t i = 0; i < s.size(); ++i) {
      std::string row = fmt_g(s.times()[i]) + "," + fmt_g(s.fisher()[i]) + "," +
                        fmt_g(s.bound()[i]) + "," + fmt_g(s.fisher_length()[i]) + "," +
                        fmt_g(s.bound_length()[i]) + "," + fmt_g(res.purity_s[i]);
      for (Eigen::Index k = 0; k < res.spectra[i].size(); ++k)
        row += "," + fmt_g(res.spectra[i](k));
      csv->push_back(row);
    }
  }
}

// --- non-Hermitian --------------------------------------------------------

nh::NonHermitianModel build_nh_model(const json& m) {
  if (m.contains("matrix")) return nh::NonHermitianModel(parse_cmat(m["matrix"]));
  const std::string preset = m["preset"].get<std::string>();
  if (preset == "diag_decay") return nh::make_diag_decay(m["g"].get<double>());
  return nh::make_pt_like(m["omega"].get<double>(), m["g"].get<double>());
}

quantum::cmat build_nh_initial(Eigen::Index model_dim, const json& ini) {
  const std::string type = ini["type"].get<std::string>();
  const auto dim = ini.contains("dim")
                       ? static_cast<Eigen::Index>(ini["dim"].get<double>())
                       : model_dim;
  if (dim != model_dim) throw std::runtime_error("initial dim does not match the model");
  if (type == "maximally_mixed")
    return quantum::cmat::Identity(dim, dim) / static_cast<double>(dim);
  if (type == "basis") {
    const auto idx = static_cast<Eigen::Index>(ini["index"].get<double>());
    if (idx < 0 || idx >= dim) throw std::runtime_error("initial basis index out of range");
    quantum::cmat rho = quantum::cmat::Zero(dim, dim);
    rho(idx, idx) = 1.0;
    return rho;
  }
  return parse_cmat(ini["matrix"]);
}

void run_nh(const ScenarioConfig& cfg, VerificationReport& report,
            std::vector<std::string>* csv) {
  const auto model = build_nh_model(cfg.model);
  const auto initial = build_nh_initial(model.h_full.rows(), cfg.initial);

  nh::NhRunOptions opts;
  opts.tau = cfg.tau;
  opts.dt = cfg.dt;
  opts.record_stride = auto_stride(cfg.tau, cfg.dt, cfg.record_stride);
  opts.pointwise_rel_tol = cfg.tol.pointwise_rel;
  opts.pointwise_abs_tol = cfg.tol.pointwise_abs;
  opts.integrated_tol = cfg.tol.integrated;

  auto res = run_nh_experiment(model, initial, opts);
  report = res.report;

  if (csv) {
    std::string header = "t,fisher,lambda,fisher_length,bound_length,purity,raw_trace";
    for (Eigen::Index i = 0; i < model.h_full.rows(); ++i)
      header += ",p_" + std::to_string(i);
    csv->push_back(header);
    const auto& s = res.series;
    for (std::size_t i = 0; i < s.size(); ++i) {
      std::string row = fmt_g(s.times()[i]) + "," + fmt_g(s.fisher()[i]) + "," +
                        fmt_g(s.bound()[i]) + "," + fmt_g(s.fisher_length()[i]) + "," +
                        fmt_g(s.bound_length()[i]) + "," + fmt_g(res.purity_vals[i]) + "," +
                        fmt_g(res.raw_traces[i]);
      for (Eigen::Index k = 0; k < res.spectra[i].size(); ++k)
        row += "," + fmt_g(res.spectra[i](k));
      csv->push_back(row);
    }
  }
}

}  // namespace

int RunSummary::exit_code() const {
  int code = 0;
  for (const auto& o : outcomes) code = std::max(code, o.status);
  return std::min(code, 2);
}

ScenarioOutcome run_one_scenario(const ScenarioConfig& cfg, const RunnerOptions& opts,
                                 std::vector<std::string>* csv_lines) {
  ScenarioOutcome out;
  out.id = cfg.id;
  out.kind = cfg.kind;
  const auto t_start = std::chrono::steady_clock::now();
  try {
    const std::uint64_t seed = opts.seed_override ? opts.seed : cfg.seed;
    if (cfg.kind == "langevin") run_langevin(cfg, seed, out.report, csv_lines);
    else if (cfg.kind == "markov") run_markov(cfg, out.report, csv_lines);
    else if (cfg.kind == "open_quantum") run_quantum(cfg, out.report, csv_lines);
    else run_nh(cfg, out.report, csv_lines);
    out.report.scenario = cfg.id;
    out.status = out.report.all_pass() ? 0 : 1;
  } catch (const std::exception& e) {
    out.status = 2;
    out.error = e.what();
    if (csv_lines) csv_lines->clear();
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return out;
}

RunSummary run_scenarios(const std::vector<ScenarioConfig>& scenarios,
                         const RunnerOptions& opts) {
  fs::create_directories(opts.out_dir);
  RunSummary summary;
  summary.outcomes.resize(scenarios.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= scenarios.size()) return;
      std::vector<std::string> lines;
      auto out = run_one_scenario(scenarios[i], opts, &lines);
      if (out.status != 2) {
        out.csv_file = scenarios[i].id + ".csv";
        std::string content;
        for (const auto& l : lines) content += l + "\n";
        write_file_atomic(fs::path(opts.out_dir) / out.csv_file, content);
      }
      summary.outcomes[i] = std::move(out);
    }
  };

  const int jobs = std::max(1, opts.jobs);
  if (jobs == 1 || scenarios.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(jobs, static_cast<int>(scenarios.size())); ++t)
      pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  write_file_atomic(fs::path(opts.out_dir) / "summary.json", summary_json(summary).dump(2) + "\n");
  return summary;
}

RunSummary run_sweep(const nlohmann::json& document, const std::string& param,
                     const std::vector<double>& values, const RunnerOptions& opts) {
  if (!document.contains("scenario") || !document["scenario"].is_array() ||
      document["scenario"].size() != 1)
    throw std::runtime_error("sweep requires a config with exactly one scenario");
  if (values.empty()) throw std::runtime_error("sweep requires at least one value");
  fs::create_directories(opts.out_dir);

  RunSummary summary;
  std::vector<std::string> check_names;
  std::vector<std::vector<double>> slack_rows;

  for (const double v : values) {
    json doc = document;
    set_by_dotted_path(doc["scenario"][0], param, json(v));
    auto cfgs = parse_config(doc);
    cfgs[0].id += "_" + param + "=" + fmt_g(v);
    auto out = run_one_scenario(cfgs[0], opts, nullptr);
    if (out.status != 2) {
      if (check_names.empty())
        for (const auto& c : out.report.checks) check_names.push_back(c.name);
      std::vector<double> row;
      for (const auto& c : out.report.checks) row.push_back(c.slack);
      slack_rows.push_back(std::move(row));
    } else {
      slack_rows.emplace_back();
    }
    summary.outcomes.push_back(std::move(out));
  }

  std::string content = "value";
  for (const auto& n : check_names) content += ",slack_" + n;
  content += "\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    content += fmt_g(values[i]);
    for (std::size_t k = 0; k < check_names.size(); ++k)
      content += "," + (k < slack_rows[i].size() ? fmt_g(slack_rows[i][k]) : std::string("nan"));
    content += "\n";
  }
  write_file_atomic(fs::path(opts.out_dir) / "sweep.csv", content);

  json j = summary_json(summary);
  // Richardson ratios of consecutive slack triples; near 4 indicates
  // second-order convergence when the swept parameter is halved.
  if (slack_rows.size() >= 3) {
    json rich = json::object();
    for (std::size_t k = 0; k < check_names.size(); ++k) {
      json ratios = json::array();
      for (std::size_t i = 0; i + 2 < slack_rows.size(); ++i) {
        if (slack_rows[i].size() <= k || slack_rows[i + 1].size() <= k ||
            slack_rows[i + 2].size() <= k)
          continue;
        const double denom = slack_rows[i + 1][k] - slack_rows[i + 2][k];
        if (denom != 0.0) ratios.push_back((slack_rows[i][k] - slack_rows[i + 1][k]) / denom);
      }
      if (!ratios.empty()) rich[check_names[k]] = ratios;
    }
    j["richardson"] = rich;
  }
  write_file_atomic(fs::path(opts.out_dir) / "summary.json", j.dump(2) + "\n");
  return summary;
}

nlohmann::json summary_json(const RunSummary& summary) {
  json j;
  j["schema_version"] = 1;
  j["exit_code"] = summary.exit_code();
  json scen = json::array();
  for (const auto& o : summary.outcomes) {
    json s;
    s["id"] = o.id;
    s["kind"] = o.kind;
    s["status"] = o.status;
    s["wall_seconds"] = o.wall_seconds;
    if (!o.error.empty()) s["error"] = o.error;
    if (!o.csv_file.empty()) s["csv"] = o.csv_file;
    json checks = json::array();
    for (const auto& c : o.report.checks) {
      json cj;
      cj["name"] = c.name;
      cj["lhs"] = c.lhs;
      cj["rhs"] = c.rhs;
      cj["slack"] = c.slack;
      cj["tolerance"] = c.tolerance;
      cj["pass"] = c.pass;
      checks.push_back(cj);
    }
    s["checks"] = checks;
    json diag = json::object();
    for (const auto& [k, v] : o.report.diagnostics) diag[k] = v;
    s["diagnostics"] = diag;
    scen.push_back(s);
  }
  j["scenarios"] = scen;
  return j;
}

}  // namespace tfi
