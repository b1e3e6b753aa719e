#include "tfi/non_hermitian.hpp"

#include <cmath>
#include <stdexcept>

namespace tfi::nh {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

cmat flow(const cmat& rho, const cmat& h_full, const cmat& gamma) {
  const double g_mean = (gamma * rho).trace().real();
  cmat out = -kI * (h_full * rho - rho * h_full.adjoint()) + 2.0 * g_mean * rho;
  return out;
}

}  // namespace

std::pair<cmat, cmat> decompose(const cmat& h_full) {
  if (h_full.rows() != h_full.cols())
    throw std::invalid_argument("decompose: matrix must be square");
  cmat h = 0.5 * (h_full + h_full.adjoint());
  cmat gamma = 0.5 * kI * (h_full - h_full.adjoint());
  return {h, gamma};
}

NonHermitianModel::NonHermitianModel(cmat h) : h_full(std::move(h)) {
  auto [hp, g] = decompose(h_full);
  hermitian_part = std::move(hp);
  dissipator = std::move(g);
  if ((h_full - (hermitian_part - kI * dissipator)).cwiseAbs().maxCoeff() > 1e-12)
    throw std::runtime_error("NonHermitianModel: decomposition does not reconstruct");
}

NormalizedState make_state(const cmat& rho0) {
  quantum::DensityOperator check(rho0);  // validates
  NormalizedState s;
  s.rho_hat = rho0;
  return s;
}

double gamma_mean(const NormalizedState& s, const NonHermitianModel& m) {
  return (m.dissipator * s.rho_hat).trace().real();
}

double gamma_std(const NormalizedState& s, const NonHermitianModel& m) {
  const double mean = gamma_mean(s, m);
  const double sq = (m.dissipator * m.dissipator * s.rho_hat).trace().real();
  return std::sqrt(std::max(0.0, sq - mean * mean));
}

double lambda_nh(const NormalizedState& s, const NonHermitianModel& m) {
  const double sd = gamma_std(s, m);
  return 4.0 * sd * sd;
}

void evolve_normalized(NormalizedState& s, const NonHermitianModel& m, double dt) {
  const double norm = m.h_full.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
  if (!(dt > 0.0) || dt * norm > 0.05 + 1e-12)
    throw std::invalid_argument("evolve_normalized: dt * |H| exceeds 0.05");

  const double g0 = gamma_mean(s, m);
  const cmat k1 = flow(s.rho_hat, m.h_full, m.dissipator);
  const cmat k2 = flow(s.rho_hat + 0.5 * dt * k1, m.h_full, m.dissipator);
  const cmat k3 = flow(s.rho_hat + 0.5 * dt * k2, m.h_full, m.dissipator);
  const cmat k4 = flow(s.rho_hat + dt * k3, m.h_full, m.dissipator);
  s.rho_hat += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  s.rho_hat = 0.5 * (s.rho_hat + s.rho_hat.adjoint().eval());

  const double tr = s.rho_hat.trace().real();
  if (!(tr > 1e-12)) throw std::runtime_error("evolve_normalized: trace collapse");
  s.trace_drift_max = std::max(s.trace_drift_max, std::abs(tr - 1.0));
  s.rho_hat /= tr;

  // Raw-trace diagnostic: d ln Tr rho / dt = -2 <gamma>.
  const double g1 = gamma_mean(s, m);
  s.log_raw_trace += -dt * (g0 + g1);
  s.time += dt;
}

NhSpectralTrack eigen_rates(const NormalizedState& s, const NonHermitianModel& m) {
  Eigen::SelfAdjointEigenSolver<cmat> es(s.rho_hat);
  const double g_mean = gamma_mean(s, m);
  const cmat delta_gamma =
      m.dissipator - g_mean * cmat::Identity(m.dissipator.rows(), m.dissipator.cols());
  const cmat anti = delta_gamma * s.rho_hat + s.rho_hat * delta_gamma;

  NhSpectralTrack track;
  track.eigenvalues = es.eigenvalues();
  track.rates.resize(track.eigenvalues.size());
  track.min_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < track.eigenvalues.size(); ++i) {
    track.rates(i) = -(es.eigenvectors().col(i).adjoint() * anti * es.eigenvectors().col(i))(0, 0)
                          .real();
    if (i > 0)
      track.min_gap = std::min(track.min_gap, track.eigenvalues(i) - track.eigenvalues(i - 1));
  }
  track.reliable = track.min_gap >= quantum::kGapThreshold;
  return track;
}

double temporal_fisher(const NhSpectralTrack& track) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < track.eigenvalues.size(); ++i)
    if (track.eigenvalues(i) >= kProbFloor)
      acc += track.rates(i) * track.rates(i) / track.eigenvalues(i);
  return acc;
}

NhRunResult run_nh_experiment(const NonHermitianModel& model, const cmat& initial,
                              const NhRunOptions& opts) {
  if (!(opts.tau > 0.0) || !(opts.dt > 0.0))
    throw std::invalid_argument("run_nh_experiment: tau and dt must be positive");
  NormalizedState state = make_state(initial);

  NhRunResult res;
  res.rho_initial = state.rho_hat;
  const double purity_0 = quantum::purity(state.rho_hat);

  auto record = [&](double t) {
    const NhSpectralTrack track = eigen_rates(state, model);
    const double lam = lambda_nh(state, model);
    if (track.reliable) {
      res.series.append(t, temporal_fisher(track), lam);
    } else {
      res.series.append_bound_only(t, lam);
      ++res.degenerate_steps;
    }
    res.purity_vals.push_back(quantum::purity(state.rho_hat));
    res.raw_traces.push_back(state.raw_trace());
    res.spectra.push_back(track.eigenvalues);
  };

  record(0.0);
  const std::size_t n_steps = static_cast<std::size_t>(std::ceil(opts.tau / opts.dt - 1e-9));
  const std::size_t stride = std::max<std::size_t>(1, opts.record_stride);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double dt = std::min(opts.dt, opts.tau - state.time);
    evolve_normalized(state, model, dt);
    if (k % stride == 0 || k + 1 == n_steps) record(state.time);
  }
  res.rho_final = state.rho_hat;
  const double purity_tau = quantum::purity(state.rho_hat);

  const quantum::DensityOperator rho0(res.rho_initial);
  const quantum::DensityOperator rho1(res.rho_final);
  const double distance = quantum::residual_bures(rho0, rho1);

  auto& rep = res.report;
  double min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < res.series.size(); ++i) {
    if (std::isnan(res.series.fisher()[i])) continue;
    const double lam = res.series.bound()[i];
    min_margin = std::min(min_margin, lam * (1.0 + opts.pointwise_rel_tol) +
                                          opts.pointwise_abs_tol - res.series.fisher()[i]);
  }
  rep.add(check_ge("fisher_le_lambda_pointwise", min_margin, 0.0, 0.0));
  rep.add(check_speed_limit("speed_limit_dissipator", res.series.total_bound_length(), distance,
                            opts.integrated_tol));
  rep.add(quantum::check_purity_speed_limit("purity_speed_limit",
                                            res.series.total_bound_length(), purity_0, purity_tau,
                                            opts.integrated_tol));
  rep.note("degenerate_steps", static_cast<double>(res.degenerate_steps));
  rep.note("distance", distance);
  rep.note("trace_drift_max", state.trace_drift_max);
  rep.note("raw_trace_final", state.raw_trace());
  return res;
}

NonHermitianModel make_diag_decay(double g) {
  cmat h = cmat::Zero(2, 2);
  h(1, 1) = -kI * g;
  return NonHermitianModel(h);
}

NonHermitianModel make_pt_like(double omega, double g) {
  cmat sx(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sz << 1, 0, 0, -1;
  const cmat gamma = 0.5 * g * (cmat::Identity(2, 2) - sz);
  return NonHermitianModel(omega * sx - kI * gamma);
}

}  // namespace tfi::nh
