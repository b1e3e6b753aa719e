// Compares the serial and OpenMP variants of the two hot kernels: the
// finite-volume right-hand side and the Monte Carlo path-information
// estimator.  Also asserts that the parallel results match the serial
// ones bit for bit.

#include <chrono>
#include <cstdio>
#include <cstring>

#include "tfi/langevin.hpp"

namespace {

double now() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

tfi::langevin::LangevinModel make_model(std::size_t cells) {
  tfi::langevin::LangevinModel m;
  m.force = tfi::langevin::make_force_ou(1.0);
  m.diffusion = 1.0;
  m.grid.origin = {-8.0};
  m.grid.spacing = {16.0 / static_cast<double>(cells)};
  m.grid.shape = {cells};
  return m;
}

void bench_rhs(std::size_t cells, int reps) {
  const auto model = make_model(cells);
  const auto initial = tfi::gaussian_density_1d(model.grid, 1.0, 0.25);
  std::vector<double> out(cells);

  double t_serial = 0.0, t_parallel = 0.0;
  double check_serial = 0.0, check_parallel = 0.0;
  {
    tfi::langevin::FokkerPlanckSolver solver(model, false);
    const double t0 = now();
    for (int r = 0; r < reps; ++r) solver.rhs(initial.values(), out);
    t_serial = now() - t0;
    check_serial = out[cells / 2];
  }
  {
    tfi::langevin::FokkerPlanckSolver solver(model, true);
    const double t0 = now();
    for (int r = 0; r < reps; ++r) solver.rhs(initial.values(), out);
    t_parallel = now() - t0;
    check_parallel = out[cells / 2];
  }
  const bool match = std::memcmp(&check_serial, &check_parallel, sizeof(double)) == 0;
  std::printf("rhs       cells=%zu reps=%d   serial %8.3f ms   parallel %8.3f ms   "
              "speedup %.2fx   %s\n",
              cells, reps, 1e3 * t_serial, 1e3 * t_parallel, t_serial / t_parallel,
              match ? "bit-identical" : "MISMATCH");
}

void bench_path_fisher(std::size_t n_traj) {
  const auto model = make_model(512);
  const auto initial = tfi::gaussian_density_1d(model.grid, 1.0, 0.25);
  tfi::langevin::PathFisherOptions opts;
  opts.t = 0.5;
  opts.dt = 1e-3;
  opts.n_traj = n_traj;
  opts.seed = 7;

  opts.parallel = false;
  double t0 = now();
  const auto serial = tfi::langevin::path_fisher_mc(model, initial, opts);
  const double t_serial = now() - t0;

  opts.parallel = true;
  t0 = now();
  const auto parallel = tfi::langevin::path_fisher_mc(model, initial, opts);
  const double t_parallel = now() - t0;

  const bool match =
      std::memcmp(&serial.estimate, &parallel.estimate, sizeof(double)) == 0;
  std::printf("path_mc   traj=%zu            serial %8.3f ms   parallel %8.3f ms   "
              "speedup %.2fx   %s\n",
              n_traj, 1e3 * t_serial, 1e3 * t_parallel, t_serial / t_parallel,
              match ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
  bench_rhs(1 << 14, 200);
  bench_rhs(1 << 16, 50);
  bench_path_fisher(20000);
  bench_path_fisher(100000);
  return 0;
}
