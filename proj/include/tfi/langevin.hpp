#ifndef TFI_LANGEVIN_HPP
#define TFI_LANGEVIN_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tfi/distributions.hpp"
#include "tfi/info_geometry.hpp"

namespace tfi::langevin {

struct LangevinModel {
  std::function<double(double)> force;  // time-independent F(x)
  double diffusion = 1.0;               // D > 0
  GridSpec grid;                        // 1D

  void validate() const;
};

struct FokkerPlanckState {
  std::vector<double> p;
  double time = 0.0;
  double entropy = 0.0;               // Sigma(t)
  double entropy_time_integral = 0.0; // int_0^t Sigma dt'
  double ep_rate = 0.0;               // Sigma-dot at `time`
  double clipped_mass = 0.0;          // total negative mass clipped so far
  bool has_rate = false;
};

// Conservative finite-volume discretization of the 1D Fokker-Planck
// equation with exponentially fitted (Scharfetter-Gummel) edge fluxes,
// advanced in time by fixed-step RK4.  The discrete Boltzmann profile of
// a gradient force is a stationary point of the scheme up to the edge
// quadrature error of the potential increments.
class FokkerPlanckSolver {
public:
  explicit FokkerPlanckSolver(LangevinModel model, bool parallel = true);

  // dp/dt = -d/dx J,  J = F p - D dp/dx discretized per edge.
  void rhs(std::span<const double> p, std::span<double> out) const;
  std::vector<double> rhs(std::span<const double> p) const;

  // nu = F - D d/dx ln p (central differences; cells below the density
  // floor return 0).
  std::vector<double> local_mean_velocity(std::span<const double> p) const;
  double entropy_production_rate(std::span<const double> p) const;
  double temporal_fisher(std::span<const double> p) const;

  // One RK4 step; entropy accumulators advance by trapezoid on the rate.
  void step(FokkerPlanckState& state, double dt) const;

  double max_stable_dt() const;  // c * dx^2 / D with c = 0.25
  double mass(std::span<const double> p) const;
  const LangevinModel& model() const { return model_; }
  FokkerPlanckState make_state(const GridDensity& initial) const;

private:
  LangevinModel model_;
  std::vector<double> force_at_cells_;
  std::vector<double> b_up_, b_down_;  // Bernoulli weights per interior edge
  bool parallel_;
  std::size_t n_;
  double dx_;
};

struct LangevinRunOptions {
  double tau = 1.0;
  double dt = 1e-4;
  double t0 = -1.0;          // < 0 means 10*dt
  std::size_t record_stride = 1;
  double pointwise_rel_tol = 1e-6;
  double pointwise_abs_tol = 1e-9;
  double integrated_tol = 1e-4;
  bool parallel = true;
};

struct LangevinRunResult {
  BoundSeries series;                // (t, fisher, Lambda_LA) from t0
  std::vector<double> entropy;       // Sigma at recorded times
  VerificationReport report;
  double entropy_time_integral = 0.0;
  double omitted_bound_length = 0.0; // small-t estimate for [0, t0]
  std::vector<double> initial_p, final_p;
};

double lambda_langevin(double accumulated_entropy, double t);

LangevinRunResult run_langevin_experiment(const LangevinModel& model,
                                          const GridDensity& initial,
                                          const LangevinRunOptions& opts);

struct PathFisherOptions {
  double t = 1.0;
  double dt = 1e-3;
  std::size_t n_traj = 100000;
  std::uint64_t seed = 1;
  bool parallel = true;
};

struct PathFisherEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n_traj = 0;
  double dt = 0.0;
};

// Monte Carlo estimate of the path Fisher information at zero
// perturbation: variance of the per-trajectory score
//   sum_k nu(x_k, t_k) (x_{k+1} - x_k - F(x_k) dt) / (2D)
// over Euler-Maruyama trajectories, with nu taken from a concurrently
// evolved Fokker-Planck density.  Deterministic for a fixed seed and
// independent of the thread count.
PathFisherEstimate path_fisher_mc(const LangevinModel& model,
                                  const GridDensity& initial,
                                  const PathFisherOptions& opts);

// Named force presets used by the CLI config.
std::function<double(double)> make_force_ou(double k);
std::function<double(double)> make_force_double_well(double a, double b);
std::function<double(double)> make_force_zero();
std::function<double(double)> make_force_polynomial(std::vector<double> coeffs);

}  // namespace tfi::langevin

#endif
