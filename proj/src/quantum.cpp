#include "tfi/quantum.hpp"

#include <cmath>
#include <stdexcept>

namespace tfi::quantum {

namespace {

using namespace std::complex_literals;

void require_hermitian(const cmat& m, double tol, const char* what) {
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument(std::string(what) + ": matrix not Hermitian");
}

}  // namespace

DensityOperator::DensityOperator(cmat m, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0)
    throw std::invalid_argument("DensityOperator: matrix must be square");
  require_hermitian(m_, 1e-12 + tol, "DensityOperator");
  if (std::abs(m_.trace().real() - 1.0) > 1e-12 + tol || std::abs(m_.trace().imag()) > 1e-12)
    throw std::invalid_argument("DensityOperator: trace must be 1");
  Eigen::SelfAdjointEigenSolver<cmat> es(m_, Eigen::EigenvaluesOnly);
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -1e-10)
      throw std::invalid_argument("DensityOperator: negative eigenvalue beyond tolerance");
    ev(i) = std::min(1.0, std::max(0.0, ev(i)));  // PSD repair of round-off
  }
  spectrum_ = ev;
}

cmat CompositeSystem::total_hamiltonian() const {
  const cmat is = cmat::Identity(dim_s, dim_s);
  const cmat ie = cmat::Identity(dim_e, dim_e);
  return kron(h_s, ie) + kron(is, h_e) + h_se;
}

void CompositeSystem::validate() const {
  if (dim_s < 2 || dim_e < 1) throw std::invalid_argument("CompositeSystem: bad dimensions");
  const int d = dim_s * dim_e;
  if (h_s.rows() != dim_s || h_e.rows() != dim_e || h_se.rows() != d || rho_se.rows() != d)
    throw std::invalid_argument("CompositeSystem: operator dimensions do not factor");
  require_hermitian(total_hamiltonian(), 1e-10, "CompositeSystem");
  require_hermitian(rho_se, 1e-10, "CompositeSystem rho");
}

cmat kron(const cmat& a, const cmat& b) {
  cmat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

cmat partial_trace_e(const cmat& rho_se, int dim_s, int dim_e) {
  if (rho_se.rows() != static_cast<Eigen::Index>(dim_s) * dim_e)
    throw std::invalid_argument("partial_trace_e: dimensions do not factor");
  cmat out = cmat::Zero(dim_s, dim_s);
  for (int i = 0; i < dim_s; ++i)
    for (int j = 0; j < dim_s; ++j)
      for (int k = 0; k < dim_e; ++k) out(i, j) += rho_se(i * dim_e + k, j * dim_e + k);
  return out;
}

cmat partial_trace_s(const cmat& rho_se, int dim_s, int dim_e) {
  if (rho_se.rows() != static_cast<Eigen::Index>(dim_s) * dim_e)
    throw std::invalid_argument("partial_trace_s: dimensions do not factor");
  cmat out = cmat::Zero(dim_e, dim_e);
  for (int k = 0; k < dim_e; ++k)
    for (int l = 0; l < dim_e; ++l)
      for (int i = 0; i < dim_s; ++i) out(k, l) += rho_se(i * dim_e + k, i * dim_e + l);
  return out;
}

CompositeEvolver::CompositeEvolver(const cmat& hamiltonian, double dt) {
  require_hermitian(hamiltonian, 1e-10, "CompositeEvolver");
  Eigen::SelfAdjointEigenSolver<cmat> es(hamiltonian);
  const Eigen::VectorXd& ev = es.eigenvalues();
  cvec phases(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    phases(i) = std::exp(std::complex<double>(0.0, -ev(i) * dt));
  u_ = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  if ((u_.adjoint() * u_ - cmat::Identity(u_.rows(), u_.cols())).cwiseAbs().maxCoeff() > 1e-12)
    throw std::runtime_error("CompositeEvolver: propagator not unitary");
}

void CompositeEvolver::apply(cmat& rho) const {
  rho = u_ * rho * u_.adjoint();
  rho = 0.5 * (rho + rho.adjoint().eval());  // strip round-off skew
}

SpectralTrack eigen_rates(const CompositeSystem& sys) {
  const cmat rho_s = partial_trace_e(sys.rho_se, sys.dim_s, sys.dim_e);
  Eigen::SelfAdjointEigenSolver<cmat> es(rho_s);

  // delta H_SE differs from H_SE by a multiple of the identity, which
  // drops out of the commutator.
  const cmat comm = sys.h_se * sys.rho_se - sys.rho_se * sys.h_se;
  const cmat m = partial_trace_e(comm, sys.dim_s, sys.dim_e);

  SpectralTrack track;
  track.eigenvalues = es.eigenvalues();
  track.eigenvectors = es.eigenvectors();
  track.rates.resize(track.eigenvalues.size());
  track.min_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < track.eigenvalues.size(); ++i) {
    const std::complex<double> v =
        (track.eigenvectors.col(i).adjoint() * m * track.eigenvectors.col(i))(0, 0);
    track.rates(i) = -(std::complex<double>(0, 1) * v).real();
    if (i > 0)
      track.min_gap = std::min(track.min_gap, track.eigenvalues(i) - track.eigenvalues(i - 1));
  }
  track.reliable = track.min_gap >= kGapThreshold;
  return track;
}

double interaction_std(const CompositeSystem& sys) {
  const std::complex<double> mean = (sys.h_se * sys.rho_se).trace();
  const std::complex<double> sq = (sys.h_se * sys.h_se * sys.rho_se).trace();
  const double var = sq.real() - mean.real() * mean.real();
  return std::sqrt(std::max(0.0, var));
}

double lambda_oq(const CompositeSystem& sys) {
  const double s = interaction_std(sys);
  return 4.0 * s * s;
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<cmat> es(rho.matrix());
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  const cmat sqrt_rho =
      es.eigenvectors() * ev.cwiseSqrt().asDiagonal().toDenseMatrix().cast<std::complex<double>>() *
      es.eigenvectors().adjoint();
  cmat inner = sqrt_rho * sigma.matrix() * sqrt_rho;
  inner = 0.5 * (inner + inner.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<cmat> es2(inner, Eigen::EigenvaluesOnly);
  double tr = 0.0;
  for (Eigen::Index i = 0; i < es2.eigenvalues().size(); ++i)
    tr += std::sqrt(std::max(0.0, es2.eigenvalues()(i)));
  return std::min(1.0, tr * tr);
}

double bures_angle(const DensityOperator& rho, const DensityOperator& sigma) {
  const double f = fidelity(rho, sigma);
  return std::acos(std::min(1.0, std::max(0.0, std::sqrt(f))));
}

double residual_bures(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) throw std::invalid_argument("residual_bures: dimension mismatch");
  const Eigen::VectorXd& p = rho.spectrum();   // already ascending
  const Eigen::VectorXd& q = sigma.spectrum();
  std::vector<double> pv(p.data(), p.data() + p.size());
  std::vector<double> qv(q.data(), q.data() + q.size());
  return bhattacharyya_arccos(pv, qv);
}

double purity(const cmat& rho) { return (rho * rho).trace().real(); }

double temporal_fisher(const SpectralTrack& track) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < track.eigenvalues.size(); ++i)
    if (track.eigenvalues(i) >= kProbFloor)
      acc += track.rates(i) * track.rates(i) / track.eigenvalues(i);
  return acc;
}

CheckResult check_purity_speed_limit(const std::string& name, double bound_length,
                                     double purity_0, double purity_tau, double tol) {
  const double arg = std::min(bound_length, M_PI / 2.0);
  return check_ge(name, 2.0 * std::sin(arg), std::abs(purity_tau - purity_0), tol);
}

QuantumRunResult run_open_quantum_experiment(const CompositeSystem& sys,
                                             const QuantumRunOptions& opts) {
  if (!(opts.tau > 0.0) || !(opts.dt > 0.0))
    throw std::invalid_argument("run_open_quantum_experiment: tau and dt must be positive");
  sys.validate();

  CompositeSystem cur = sys;
  const cmat h = cur.total_hamiltonian();
  const CompositeEvolver evolver(h, opts.dt);

  QuantumRunResult res;
  res.rho_s_initial = partial_trace_e(cur.rho_se, cur.dim_s, cur.dim_e);
  const double purity_0 = purity(res.rho_s_initial);
  const double composite_purity_0 = purity(cur.rho_se);

  auto record = [&](double t) {
    const SpectralTrack track = eigen_rates(cur);
    const double lam = lambda_oq(cur);
    if (track.reliable) {
      res.series.append(t, temporal_fisher(track), lam);
    } else {
      res.series.append_bound_only(t, lam);
      ++res.degenerate_steps;
    }
    res.purity_s.push_back(purity(partial_trace_e(cur.rho_se, cur.dim_s, cur.dim_e)));
    res.spectra.push_back(track.eigenvalues);
  };

  // t = 0 sample included with generator-evaluated rates.
  {
    const SpectralTrack track0 = eigen_rates(cur);
    const double lam0 = lambda_oq(cur);
    if (track0.reliable) {
      res.series.append(0.0, temporal_fisher(track0), lam0);
    } else {
      res.series.append_bound_only(0.0, lam0);
      ++res.degenerate_steps;
    }
    res.purity_s.push_back(purity_0);
    res.spectra.push_back(track0.eigenvalues);
  }

  const std::size_t n_steps = static_cast<std::size_t>(std::ceil(opts.tau / opts.dt - 1e-9));
  const std::size_t stride = std::max<std::size_t>(1, opts.record_stride);
  double t = 0.0;
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double dt = std::min(opts.dt, opts.tau - t);
    if (dt < opts.dt * (1.0 - 1e-9)) {
      CompositeEvolver partial(h, dt);
      partial.apply(cur.rho_se);
    } else {
      evolver.apply(cur.rho_se);
    }
    t += dt;
    if (k % stride == 0 || k + 1 == n_steps) record(t);
  }

  res.rho_s_final = partial_trace_e(cur.rho_se, cur.dim_s, cur.dim_e);
  const double purity_tau = purity(res.rho_s_final);

  const DensityOperator rho0(res.rho_s_initial);
  const DensityOperator rho1(res.rho_s_final);
  const double distance = residual_bures(rho0, rho1);

  auto& rep = res.report;
  double min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < res.series.size(); ++i) {
    if (std::isnan(res.series.fisher()[i])) continue;
    const double lam = res.series.bound()[i];
    min_margin = std::min(min_margin, lam * (1.0 + opts.pointwise_rel_tol) +
                                          opts.pointwise_abs_tol - res.series.fisher()[i]);
  }
  rep.add(check_ge("fisher_le_lambda_pointwise", min_margin, 0.0, 0.0));
  rep.add(check_speed_limit("speed_limit_interaction", res.series.total_bound_length(), distance,
                            opts.integrated_tol));
  rep.add(check_speed_limit("speed_limit_residual_bures", res.series.total_bound_length(),
                            distance, opts.integrated_tol));
  rep.add(check_purity_speed_limit("purity_speed_limit", res.series.total_bound_length(), purity_0,
                                   purity_tau, opts.integrated_tol));
  rep.note("degenerate_steps", static_cast<double>(res.degenerate_steps));
  rep.note("distance", distance);
  rep.note("composite_purity_drift", std::abs(purity(cur.rho_se) - composite_purity_0));
  rep.note("trace_drift", std::abs(cur.rho_se.trace().real() - 1.0));
  return res;
}

CompositeSystem make_two_qubit_xx(double g) {
  CompositeSystem sys;
  sys.dim_s = 2;
  sys.dim_e = 2;
  cmat sx(2, 2);
  sx << 0, 1, 1, 0;
  sys.h_s = cmat::Zero(2, 2);
  sys.h_e = cmat::Zero(2, 2);
  sys.h_se = g * kron(sx, sx);
  cvec psi = cvec::Zero(4);
  psi(0) = 1.0;  // |00>
  sys.rho_se = psi * psi.adjoint();
  return sys;
}

CompositeSystem make_qubit_env(double g, double omega_s, double omega_e, int dim_e) {
  if (dim_e < 2 || dim_e > 16) throw std::invalid_argument("make_qubit_env: dim_e out of range");
  CompositeSystem sys;
  sys.dim_s = 2;
  sys.dim_e = dim_e;
  cmat sx(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sz << 1, 0, 0, -1;
  sys.h_s = 0.5 * omega_s * sz;
  sys.h_e = cmat::Zero(dim_e, dim_e);
  for (int k = 0; k < dim_e; ++k) sys.h_e(k, k) = omega_e * k;
  cmat ladder = cmat::Zero(dim_e, dim_e);  // nearest-neighbor coupling
  for (int k = 0; k + 1 < dim_e; ++k) {
    ladder(k, k + 1) = 1.0;
    ladder(k + 1, k) = 1.0;
  }
  sys.h_se = g * kron(sx, ladder);
  cvec psi = cvec::Zero(2 * dim_e);
  psi(0) = 1.0;  // |0>_S |0>_E
  sys.rho_se = psi * psi.adjoint();
  return sys;
}

}  // namespace tfi::quantum
