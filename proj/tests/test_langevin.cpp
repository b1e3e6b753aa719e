#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <vector>

#include "tfi/langevin.hpp"
#include "oracles.hpp"

using namespace tfi;
using namespace tfi::langevin;

namespace {

LangevinModel ou_model(double k, double d, std::size_t cells, double half_width = 8.0) {
  LangevinModel m;
  m.force = make_force_ou(k);
  m.diffusion = d;
  m.grid.origin = {-half_width};
  m.grid.spacing = {2.0 * half_width / static_cast<double>(cells)};
  m.grid.shape = {cells};
  return m;
}

double grid_mean(const GridSpec& g, const std::vector<double>& p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += g.center(0, i) * p[i];
  return acc * g.cell_volume();
}

double grid_var(const GridSpec& g, const std::vector<double>& p) {
  const double mu = grid_mean(g, p);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = g.center(0, i) - mu;
    acc += d * d * p[i];
  }
  return acc * g.cell_volume();
}

}  // namespace

TEST_CASE("Boltzmann profile is stationary for the discrete scheme") {
  const auto model = ou_model(1.0, 1.0, 256);
  // Stationary variance D/k = 1.
  const auto p = gaussian_density_1d(model.grid, 0.0, 1.0);
  FokkerPlanckSolver solver(model);
  const auto r = solver.rhs(p.values());
  double max_abs = 0.0;
  for (double v : r) max_abs = std::max(max_abs, std::abs(v));
  CHECK(max_abs < 1e-8);
}

TEST_CASE("right-hand side conserves mass") {
  const auto model = ou_model(2.0, 0.5, 128);
  const auto p = gaussian_density_1d(model.grid, 1.5, 0.4);
  FokkerPlanckSolver solver(model);
  const auto r = solver.rhs(p.values());
  double total = 0.0;
  for (double v : r) total += v;
  CHECK(std::abs(total * model.grid.cell_volume()) < 1e-12);
}

TEST_CASE("local mean velocity vanishes at equilibrium") {
  const auto model = ou_model(1.0, 1.0, 512);
  const auto p = gaussian_density_1d(model.grid, 0.0, 1.0);
  FokkerPlanckSolver solver(model);
  const auto nu = solver.local_mean_velocity(p.values());
  double max_abs = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i)
    if (p[i] > 1e-6) max_abs = std::max(max_abs, std::abs(nu[i]));
  CHECK(max_abs < 1e-10);
  CHECK(solver.entropy_production_rate(p.values()) < 1e-12);
}

TEST_CASE("relaxation moments follow the closed form") {
  const oracles::OuMoments ora{1.0, 1.0, 0.3, 0.25};
  const auto model = ou_model(1.0, 1.0, 512);
  FokkerPlanckSolver solver(model);
  auto state = solver.make_state(gaussian_density_1d(model.grid, ora.mu0, ora.var0));
  const double dt = 2e-4;
  const int steps = 2500;  // tau = 0.5
  for (int i = 0; i < steps; ++i) solver.step(state, dt);
  // Spatial discretization bias is O(dx^2) ~ 1e-3 relative at 512 cells.
  CHECK(grid_mean(model.grid, state.p) == doctest::Approx(ora.mean(0.5)).epsilon(1e-3));
  CHECK(grid_var(model.grid, state.p) == doctest::Approx(ora.var(0.5)).epsilon(1e-3));
  CHECK(solver.mass(state.p) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Fisher information and entropy rate match the Gaussian forms") {
  const oracles::OuMoments ora{1.0, 1.0, 0.3, 0.25};
  const auto model = ou_model(1.0, 1.0, 1024);
  FokkerPlanckSolver solver(model);
  auto state = solver.make_state(gaussian_density_1d(model.grid, ora.mu0, ora.var0));
  const double dt = 5e-5;
  for (int i = 0; i < 4000; ++i) solver.step(state, dt);  // t = 0.2
  CHECK(solver.temporal_fisher(state.p) == doctest::Approx(ora.fisher(0.2)).epsilon(1e-2));
  CHECK(solver.entropy_production_rate(state.p) ==
        doctest::Approx(ora.ep_rate(0.2)).epsilon(1e-2));
}

TEST_CASE("accumulated entropy matches closed-form quadrature") {
  const oracles::OuMoments ora{1.0, 1.0, 0.3, 0.25};
  const auto model = ou_model(1.0, 1.0, 512);
  FokkerPlanckSolver solver(model);
  auto state = solver.make_state(gaussian_density_1d(model.grid, ora.mu0, ora.var0));
  const double dt = 2e-4;
  for (int i = 0; i < 5000; ++i) solver.step(state, dt);  // t = 1
  const double expected = oracles::simpson([&](double t) { return ora.ep_rate(t); }, 0.0, 1.0);
  CHECK(state.entropy == doctest::Approx(expected).epsilon(2e-3));
}

TEST_CASE("experiment checks all pass for the relaxing well") {
  const auto model = ou_model(1.0, 1.0, 512);
  LangevinRunOptions opts;
  opts.tau = 1.0;
  opts.dt = 2e-4;
  opts.record_stride = 10;
  const auto res =
      run_langevin_experiment(model, gaussian_density_1d(model.grid, 0.3, 0.25), opts);
  for (const auto& c : res.report.checks) {
    INFO(c.name);
    CHECK(c.pass);
  }
  CHECK(res.series.total_bound_length() >= res.series.total_fisher_length() - 1e-9);
}

TEST_CASE("serial and parallel right-hand sides agree bit for bit") {
  const auto model = ou_model(1.0, 1.0, 8192);
  const auto p = gaussian_density_1d(model.grid, 0.5, 0.5);
  const auto serial = FokkerPlanckSolver(model, false).rhs(p.values());
  const auto parallel = FokkerPlanckSolver(model, true).rhs(p.values());
  CHECK(std::memcmp(serial.data(), parallel.data(), serial.size() * sizeof(double)) == 0);
}

TEST_CASE("step rejects unstable time steps") {
  const auto model = ou_model(1.0, 1.0, 256);
  FokkerPlanckSolver solver(model);
  auto state = solver.make_state(gaussian_density_1d(model.grid, 0.0, 0.5));
  CHECK_THROWS(solver.step(state, 10.0 * solver.max_stable_dt()));
}

TEST_CASE("entropy bound is undefined at t = 0") {
  CHECK_THROWS(lambda_langevin(1.0, 0.0));
  CHECK(lambda_langevin(2.0, 2.0) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("path-information estimate agrees with half the entropy production") {
  const oracles::OuMoments ora{1.0, 1.0, 0.3, 0.25};
  const auto model = ou_model(1.0, 1.0, 256);
  const auto initial = gaussian_density_1d(model.grid, ora.mu0, ora.var0);
  PathFisherOptions opts;
  opts.t = 0.5;
  opts.dt = 1e-3;
  opts.n_traj = 20000;
  opts.seed = 11;
  const auto est = path_fisher_mc(model, initial, opts);
  const double target =
      0.5 * oracles::simpson([&](double t) { return ora.ep_rate(t); }, 0.0, 0.5);
  CHECK(std::abs(est.estimate - target) < 4.0 * est.std_error);

  SUBCASE("fixed seed reproduces the estimate exactly") {
    const auto again = path_fisher_mc(model, initial, opts);
    CHECK(std::memcmp(&again.estimate, &est.estimate, sizeof(double)) == 0);
    CHECK(again.std_error == est.std_error);
  }
  SUBCASE("serial evaluation matches the parallel one exactly") {
    auto serial_opts = opts;
    serial_opts.parallel = false;
    const auto serial = path_fisher_mc(model, initial, serial_opts);
    CHECK(std::memcmp(&serial.estimate, &est.estimate, sizeof(double)) == 0);
  }
  SUBCASE("another seed gives a different but consistent estimate") {
    auto other = opts;
    other.seed = 12;
    const auto est2 = path_fisher_mc(model, initial, other);
    CHECK(est2.estimate != est.estimate);
    CHECK(std::abs(est2.estimate - target) < 4.0 * est2.std_error);
  }
}

TEST_CASE("standard error shrinks like the square root of the sample count") {
  const auto model = ou_model(1.0, 1.0, 128);
  const auto initial = gaussian_density_1d(model.grid, 0.3, 0.25);
  PathFisherOptions opts;
  opts.t = 0.2;
  opts.dt = 2e-3;
  opts.seed = 5;
  opts.n_traj = 4000;
  const auto small = path_fisher_mc(model, initial, opts);
  opts.n_traj = 16000;
  const auto large = path_fisher_mc(model, initial, opts);
  CHECK(large.std_error == doctest::Approx(0.5 * small.std_error).epsilon(0.25));
}

TEST_CASE("trajectory counts below the statistical minimum are rejected") {
  const auto model = ou_model(1.0, 1.0, 128);
  const auto initial = gaussian_density_1d(model.grid, 0.0, 0.25);
  PathFisherOptions opts;
  opts.n_traj = 10;
  CHECK_THROWS(path_fisher_mc(model, initial, opts));
}
