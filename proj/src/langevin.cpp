#include "tfi/langevin.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tfi::langevin {

namespace {

// B(z) = z / (e^z - 1), the Scharfetter-Gummel weight.
double bernoulli_weight(double z) {
  if (std::abs(z) < 1e-8) return 1.0 - 0.5 * z + z * z / 12.0;
  return z / std::expm1(z);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void LangevinModel::validate() const {
  if (!(diffusion > 0.0)) throw std::invalid_argument("LangevinModel: D must be positive");
  if (!force) throw std::invalid_argument("LangevinModel: missing force");
  grid.validate();
  if (grid.ndim() != 1)
    throw std::invalid_argument("LangevinModel: only 1D grids are supported");
  for (std::size_t i = 0; i < grid.shape[0]; ++i) {
    if (!std::isfinite(force(grid.center(0, i))))
      throw std::invalid_argument("LangevinModel: force not finite on grid");
  }
}

FokkerPlanckSolver::FokkerPlanckSolver(LangevinModel model, bool parallel)
    : model_(std::move(model)), parallel_(parallel) {
  model_.validate();
  n_ = model_.grid.shape[0];
  dx_ = model_.grid.spacing[0];
  const double d = model_.diffusion;
  force_at_cells_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) force_at_cells_[i] = model_.force(model_.grid.center(0, i));

  const std::size_t n_edges = model_.grid.boundary == Boundary::periodic ? n_ : n_ - 1;
  b_up_.resize(n_edges);
  b_down_.resize(n_edges);
  for (std::size_t e = 0; e < n_edges; ++e) {
    // u = (1/D) int F dx between the adjacent cell centers (Simpson).
    const double xl = model_.grid.center(0, e);
    const double xr = xl + dx_;
    const double u =
        dx_ / (6.0 * d) * (model_.force(xl) + 4.0 * model_.force(0.5 * (xl + xr)) + model_.force(xr));
    b_up_[e] = bernoulli_weight(-u);  // weight of the left cell
    b_down_[e] = bernoulli_weight(u);
  }
}

void FokkerPlanckSolver::rhs(std::span<const double> p, std::span<double> out) const {
  const double c = model_.diffusion / dx_;
  const bool periodic = model_.grid.boundary == Boundary::periodic;
  const auto flux = [&](std::size_t e) {
    const std::size_t l = e;
    const std::size_t r = (e + 1) % n_;
    return c * (b_up_[e] * p[l] - b_down_[e] * p[r]);
  };
#pragma omp parallel for schedule(static) if (parallel_ && n_ > 4096)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n_); ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    double j_left, j_right;
    if (periodic) {
      j_left = flux(i == 0 ? n_ - 1 : i - 1);
      j_right = flux(i);
    } else {
      j_left = i == 0 ? 0.0 : flux(i - 1);
      j_right = i == n_ - 1 ? 0.0 : flux(i);
    }
    out[i] = -(j_right - j_left) / dx_;
  }
}

std::vector<double> FokkerPlanckSolver::rhs(std::span<const double> p) const {
  std::vector<double> out(n_);
  rhs(p, out);
  return out;
}

std::vector<double> FokkerPlanckSolver::local_mean_velocity(std::span<const double> p) const {
  const double floor = kProbFloor / dx_;
  const double d = model_.diffusion;
  std::vector<double> nu(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    if (p[i] < floor) continue;
    const bool periodic = model_.grid.boundary == Boundary::periodic;
    const std::size_t im = i == 0 ? (periodic ? n_ - 1 : 0) : i - 1;
    const std::size_t ip = i == n_ - 1 ? (periodic ? 0 : n_ - 1) : i + 1;
    if (p[im] < floor || p[ip] < floor) continue;
    const double h = im == i || ip == i ? dx_ : 2.0 * dx_;  // one-sided at walls
    nu[i] = force_at_cells_[i] - d * (std::log(p[ip]) - std::log(p[im])) / h;
  }
  return nu;
}

double FokkerPlanckSolver::entropy_production_rate(std::span<const double> p) const {
  const auto nu = local_mean_velocity(p);
  double acc = 0.0;
  for (std::size_t i = 0; i < n_; ++i) acc += nu[i] * nu[i] * p[i];
  return acc * dx_ / model_.diffusion;
}

double FokkerPlanckSolver::temporal_fisher(std::span<const double> p) const {
  const auto dp = rhs(p);
  const double floor = kProbFloor / dx_;
  double acc = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    if (p[i] >= floor) acc += dp[i] * dp[i] / p[i];
  return acc * dx_;
}

double FokkerPlanckSolver::max_stable_dt() const {
  const double diffusive = 0.25 * dx_ * dx_ / model_.diffusion;
  double fmax = 0.0;
  for (double f : force_at_cells_) fmax = std::max(fmax, std::abs(f));
  const double advective = fmax > 0.0 ? 0.5 * dx_ / fmax : diffusive;
  return std::min(diffusive, advective);
}

double FokkerPlanckSolver::mass(std::span<const double> p) const {
  double m = 0.0;
  for (double v : p) m += v;
  return m * dx_;
}

FokkerPlanckState FokkerPlanckSolver::make_state(const GridDensity& initial) const {
  if (!initial.grid().compatible(model_.grid))
    throw std::invalid_argument("FokkerPlanckSolver: initial density grid mismatch");
  FokkerPlanckState s;
  s.p = initial.values();
  s.ep_rate = entropy_production_rate(s.p);
  s.has_rate = true;
  return s;
}

void FokkerPlanckSolver::step(FokkerPlanckState& state, double dt) const {
  if (!(dt > 0.0) || dt > max_stable_dt() * (1.0 + 1e-12))
    throw std::invalid_argument("FokkerPlanckSolver: dt violates the stability bound");
  if (!state.has_rate) {
    state.ep_rate = entropy_production_rate(state.p);
    state.has_rate = true;
  }
  const std::size_t n = n_;
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  rhs(state.p, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = state.p[i] + 0.5 * dt * k1[i];
  rhs(tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = state.p[i] + 0.5 * dt * k2[i];
  rhs(tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = state.p[i] + dt * k3[i];
  rhs(tmp, k4);
  for (std::size_t i = 0; i < n; ++i)
    state.p[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

  for (double& v : state.p) {
    if (v < 0.0) {
      if (v < -1e-8) throw std::runtime_error("FokkerPlanckSolver: density went negative");
      state.clipped_mass += -v * dx_;
      v = 0.0;
    }
  }

  const double new_rate = entropy_production_rate(state.p);
  const double old_entropy = state.entropy;
  state.entropy += 0.5 * dt * (state.ep_rate + new_rate);
  state.entropy_time_integral += 0.5 * dt * (old_entropy + state.entropy);
  state.ep_rate = new_rate;
  state.time += dt;
}

double lambda_langevin(double accumulated_entropy, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("lambda_langevin: requires t > 0");
  return accumulated_entropy / (2.0 * t * t);
}

LangevinRunResult run_langevin_experiment(const LangevinModel& model,
                                          const GridDensity& initial,
                                          const LangevinRunOptions& opts) {
  if (!(opts.tau > 0.0) || !(opts.dt > 0.0))
    throw std::invalid_argument("run_langevin_experiment: tau and dt must be positive");
  const double t0 = opts.t0 < 0.0 ? 10.0 * opts.dt : opts.t0;
  if (!(opts.tau > t0)) throw std::invalid_argument("run_langevin_experiment: tau <= t0");

  FokkerPlanckSolver solver(model, opts.parallel);
  FokkerPlanckState state = solver.make_state(initial);

  LangevinRunResult res;
  res.initial_p = state.p;
  res.omitted_bound_length = std::sqrt(0.5 * state.ep_rate * t0);

  const std::size_t n_steps = static_cast<std::size_t>(std::ceil(opts.tau / opts.dt - 1e-9));
  std::vector<double> first_recorded_p;
  const std::size_t stride = std::max<std::size_t>(1, opts.record_stride);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double dt = std::min(opts.dt, opts.tau - state.time);
    solver.step(state, dt);
    const bool last = k + 1 == n_steps;
    if (state.time + 1e-12 >= t0 && (k % stride == 0 || last)) {
      const double fisher = solver.temporal_fisher(state.p);
      res.series.append(state.time, fisher, lambda_langevin(state.entropy, state.time));
      res.entropy.push_back(state.entropy);
      if (first_recorded_p.empty()) first_recorded_p = state.p;
    }
  }
  res.final_p = state.p;
  res.entropy_time_integral = state.entropy_time_integral;

  const GridDensity p_begin(model.grid, res.initial_p, 1e-6);
  const GridDensity p_end(model.grid, res.final_p, 1e-6);
  const double distance = bhattacharyya_arccos_grid(p_begin, p_end);

  auto& rep = res.report;
  double min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < res.series.size(); ++i) {
    const double lam = res.series.bound()[i];
    min_margin = std::min(min_margin, lam * (1.0 + opts.pointwise_rel_tol) +
                                          opts.pointwise_abs_tol - res.series.fisher()[i]);
  }
  rep.add(check_ge("fisher_le_lambda_pointwise", min_margin, 0.0, 0.0));
  rep.add(check_speed_limit("speed_limit_entropy", res.series.total_bound_length(),
                            distance, opts.integrated_tol));
  const GridDensity p_t0(model.grid, first_recorded_p, 1e-6);
  rep.add(check_speed_limit("wootters_fisher_length", res.series.total_fisher_length(),
                            bhattacharyya_arccos_grid(p_t0, p_end), opts.integrated_tol));
  const double w2 = wasserstein_1d(p_begin, p_end);
  rep.add(check_ge("wasserstein_comparison", state.entropy_time_integral,
                   w2 / (model.diffusion * opts.tau), opts.integrated_tol));

  rep.note("mass_drift", std::abs(solver.mass(state.p) - 1.0));
  rep.note("clipped_mass", state.clipped_mass);
  rep.note("omitted_bound_length", res.omitted_bound_length);
  rep.note("wasserstein_sq", w2);
  rep.note("distance", distance);
  return res;
}

PathFisherEstimate path_fisher_mc(const LangevinModel& model,
                                  const GridDensity& initial,
                                  const PathFisherOptions& opts) {
  if (opts.n_traj < 1000)
    throw std::invalid_argument("path_fisher_mc: need at least 1000 trajectories");
  if (!(opts.t > 0.0) || !(opts.dt > 0.0) || opts.dt > opts.t)
    throw std::invalid_argument("path_fisher_mc: invalid time parameters");

  FokkerPlanckSolver solver(model, false);
  FokkerPlanckState state = solver.make_state(initial);
  const std::size_t n_cells = model.grid.shape[0];
  const double dx = model.grid.spacing[0];
  const double x_lo = model.grid.origin[0];

  const std::size_t n_steps = static_cast<std::size_t>(std::llround(opts.t / opts.dt));
  const std::size_t n_sub =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(opts.dt / solver.max_stable_dt())));
  const double dt_sub = opts.dt / static_cast<double>(n_sub);

  // nu(x, t_k) tables for every Monte Carlo step, from the FPE density.
  std::vector<double> nu_table(n_steps * n_cells);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const auto nu = solver.local_mean_velocity(state.p);
    std::copy(nu.begin(), nu.end(), nu_table.begin() + static_cast<std::ptrdiff_t>(k * n_cells));
    for (std::size_t s = 0; s < n_sub; ++s) solver.step(state, dt_sub);
  }

  // Initial-position sampling via the inverse CDF at cell edges.
  std::vector<double> cdf(n_cells + 1, 0.0);
  for (std::size_t i = 0; i < n_cells; ++i) cdf[i + 1] = cdf[i] + initial[i] * dx;
  for (double& v : cdf) v /= cdf.back();

  const auto sample_x0 = [&](double u) {
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t i = it == cdf.begin() ? 0 : static_cast<std::size_t>(it - cdf.begin()) - 1;
    if (i >= n_cells) i = n_cells - 1;
    const double df = cdf[i + 1] - cdf[i];
    const double frac = df > 0.0 ? (u - cdf[i]) / df : 0.5;
    return x_lo + (static_cast<double>(i) + frac) * dx;
  };
  const auto interp_nu = [&](std::size_t k, double x) {
    double s = (x - x_lo) / dx - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(n_cells - 1));
    const std::size_t i = std::min(static_cast<std::size_t>(s), n_cells - 2);
    const double w = s - static_cast<double>(i);
    const double* row = nu_table.data() + k * n_cells;
    return (1.0 - w) * row[i] + w * row[i + 1];
  };

  const double d = model.diffusion;
  const double noise_amp = std::sqrt(2.0 * d * opts.dt);
  std::vector<double> scores(opts.n_traj);

#pragma omp parallel for schedule(static) if (opts.parallel)
  for (std::ptrdiff_t ti = 0; ti < static_cast<std::ptrdiff_t>(opts.n_traj); ++ti) {
    std::mt19937_64 rng(splitmix64(opts.seed ^ (0x7f4a7c15ULL + static_cast<std::uint64_t>(ti) *
                                                                    0x9e3779b97f4a7c15ULL)));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    double x = sample_x0(unif(rng));
    double score = 0.0;
    for (std::size_t k = 0; k < n_steps; ++k) {
      const double noise = noise_amp * normal(rng);
      score += interp_nu(k, x) * noise / (2.0 * d);
      x += model.force(x) * opts.dt + noise;
    }
    scores[static_cast<std::size_t>(ti)] = score;
  }

  // Fixed-order compensated reduction: results do not depend on the
  // thread count.
  const auto kahan_sum = [](const std::vector<double>& v, auto&& f) {
    double sum = 0.0, c = 0.0;
    for (double x : v) {
      const double y = f(x) - c;
      const double t = sum + y;
      c = (t - sum) - y;
      sum = t;
    }
    return sum;
  };
  const double n = static_cast<double>(opts.n_traj);
  const double mean = kahan_sum(scores, [](double x) { return x; }) / n;
  const double m2 = kahan_sum(scores, [&](double x) { return (x - mean) * (x - mean); }) / n;
  const double m4 = kahan_sum(scores, [&](double x) {
                      const double d2 = (x - mean) * (x - mean);
                      return d2 * d2;
                    }) / n;
  PathFisherEstimate est;
  est.estimate = m2 * n / (n - 1.0);
  est.std_error = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
  est.n_traj = opts.n_traj;
  est.dt = opts.dt;
  return est;
}

std::function<double(double)> make_force_ou(double k) {
  return [k](double x) { return -k * x; };
}

std::function<double(double)> make_force_double_well(double a, double b) {
  return [a, b](double x) { return -a * x * x * x + b * x; };
}

std::function<double(double)> make_force_zero() {
  return [](double) { return 0.0; };
}

std::function<double(double)> make_force_polynomial(std::vector<double> coeffs) {
  return [c = std::move(coeffs)](double x) {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
  };
}

}  // namespace tfi::langevin
