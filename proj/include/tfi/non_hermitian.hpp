#ifndef TFI_NON_HERMITIAN_HPP
#define TFI_NON_HERMITIAN_HPP

#include <Eigen/Dense>

#include "tfi/info_geometry.hpp"
#include "tfi/quantum.hpp"

namespace tfi::nh {

using quantum::cmat;

// H_full = H - i gamma with both parts Hermitian.
struct NonHermitianModel {
  cmat h_full;
  cmat hermitian_part;  // H
  cmat dissipator;      // gamma

  explicit NonHermitianModel(cmat h);
};

std::pair<cmat, cmat> decompose(const cmat& h_full);

struct NormalizedState {
  cmat rho_hat;           // trace re-pinned to 1 each step
  double log_raw_trace = 0.0;  // ln Tr rho, integrated from -2<gamma>
  double time = 0.0;
  double trace_drift_max = 0.0;

  double raw_trace() const { return std::exp(log_raw_trace); }
};

NormalizedState make_state(const cmat& rho0);

double gamma_mean(const NormalizedState& s, const NonHermitianModel& m);
double gamma_std(const NormalizedState& s, const NonHermitianModel& m);
double lambda_nh(const NormalizedState& s, const NonHermitianModel& m);  // 4 <<gamma>>^2

// RK4 on the normalized flow
//   rho-dot = -i(H_full rho - rho H_full+) + 2<gamma> rho,
// with <gamma> recomputed inside each stage (the flow is nonlinear).
void evolve_normalized(NormalizedState& s, const NonHermitianModel& m, double dt);

struct NhSpectralTrack {
  Eigen::VectorXd eigenvalues;
  Eigen::VectorXd rates;  // dp_i/dt = -<p_i|{delta gamma, rho}|p_i>
  double min_gap = 0.0;
  bool reliable = true;
};

NhSpectralTrack eigen_rates(const NormalizedState& s, const NonHermitianModel& m);
double temporal_fisher(const NhSpectralTrack& track);

struct NhRunOptions {
  double tau = 1.0;
  double dt = 1e-3;
  std::size_t record_stride = 1;
  double pointwise_rel_tol = 1e-6;
  double pointwise_abs_tol = 1e-9;
  double integrated_tol = 1e-4;
};

struct NhRunResult {
  BoundSeries series;  // bound = Lambda_NH
  std::vector<double> purity_vals, raw_traces;
  std::vector<Eigen::VectorXd> spectra;
  VerificationReport report;
  cmat rho_initial, rho_final;
  std::size_t degenerate_steps = 0;
};

NhRunResult run_nh_experiment(const NonHermitianModel& model, const cmat& initial,
                              const NhRunOptions& opts);

// Config presets.
NonHermitianModel make_diag_decay(double g);
NonHermitianModel make_pt_like(double omega, double g);

}  // namespace tfi::nh

#endif
