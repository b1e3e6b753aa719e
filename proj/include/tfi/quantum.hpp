#ifndef TFI_QUANTUM_HPP
#define TFI_QUANTUM_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "tfi/info_geometry.hpp"

namespace tfi::quantum {

using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;

// Eigenvalues of rho_S closer than this are treated as degenerate; the
// per-eigenvector rates are then ill-conditioned and the sample is
// excluded from the bound series.
inline constexpr double kGapThreshold = 1e-8;

class DensityOperator {
public:
  explicit DensityOperator(cmat m, double tol = 1e-10);

  int dim() const { return static_cast<int>(m_.rows()); }
  const cmat& matrix() const { return m_; }
  // Ascending eigenvalues, clipped into [0, 1] for round-off.
  const Eigen::VectorXd& spectrum() const { return spectrum_; }

private:
  cmat m_;
  Eigen::VectorXd spectrum_;
};

struct CompositeSystem {
  int dim_s = 0, dim_e = 0;
  cmat h_s, h_e, h_se;  // h_se acts on the full S x E space
  cmat rho_se;

  cmat total_hamiltonian() const;
  void validate() const;
};

cmat kron(const cmat& a, const cmat& b);
cmat partial_trace_e(const cmat& rho_se, int dim_s, int dim_e);
cmat partial_trace_s(const cmat& rho_se, int dim_s, int dim_e);

// Unitary step rho <- U rho U+ with U = exp(-i H dt) from the Hermitian
// eigendecomposition of the (constant) total Hamiltonian.
class CompositeEvolver {
public:
  CompositeEvolver(const cmat& hamiltonian, double dt);
  void apply(cmat& rho) const;
  const cmat& unitary() const { return u_; }

private:
  cmat u_;
};

struct SpectralTrack {
  Eigen::VectorXd eigenvalues;  // of rho_S, ascending
  cmat eigenvectors;            // columns match eigenvalues
  Eigen::VectorXd rates;        // dp_i/dt
  double min_gap = 0.0;
  bool reliable = true;  // false when the spectrum is degenerate
};

// dp_i/dt = -i <p_i| Tr_E [H_SE, rho_SE] |p_i>.
SpectralTrack eigen_rates(const CompositeSystem& sys);

double interaction_std(const CompositeSystem& sys);  // <<H_SE>>
double lambda_oq(const CompositeSystem& sys);        // 4 <<H_SE>>^2

double fidelity(const DensityOperator& rho, const DensityOperator& sigma);
double bures_angle(const DensityOperator& rho, const DensityOperator& sigma);
// Bhattacharyya arccos distance between ascending-sorted spectra.
double residual_bures(const DensityOperator& rho, const DensityOperator& sigma);

double purity(const cmat& rho);
double temporal_fisher(const SpectralTrack& track);

// pass iff 2 sin(min(bound_length, pi/2)) >= |p_tau - p_0| - tol.
CheckResult check_purity_speed_limit(const std::string& name, double bound_length,
                                     double purity_0, double purity_tau, double tol);

struct QuantumRunOptions {
  double tau = 1.0;
  double dt = 1e-3;
  std::size_t record_stride = 1;
  double pointwise_rel_tol = 1e-6;
  double pointwise_abs_tol = 1e-9;
  double integrated_tol = 1e-4;
};

struct QuantumRunResult {
  BoundSeries series;  // bound = Lambda_OQ; degenerate steps bound-only
  std::vector<double> purity_s;
  std::vector<Eigen::VectorXd> spectra;
  VerificationReport report;
  cmat rho_s_initial, rho_s_final;
  std::size_t degenerate_steps = 0;
};

QuantumRunResult run_open_quantum_experiment(const CompositeSystem& sys,
                                             const QuantumRunOptions& opts);

// Config presets.
CompositeSystem make_two_qubit_xx(double g);
CompositeSystem make_qubit_env(double g, double omega_s, double omega_e, int dim_e);

}  // namespace tfi::quantum

#endif
