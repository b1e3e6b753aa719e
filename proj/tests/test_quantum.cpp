#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tfi/quantum.hpp"
#include "oracles.hpp"

using namespace tfi;
using namespace tfi::quantum;

namespace {

cmat random_density(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  cmat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = std::complex<double>(g(rng), g(rng));
  cmat rho = a * a.adjoint();
  return rho / rho.trace().real();
}

cmat random_unitary(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  cmat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = std::complex<double>(g(rng), g(rng));
  const cmat h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<cmat> es(h);
  return es.eigenvectors() *
         (std::complex<double>(0, 1) * es.eigenvalues().array()).exp().matrix().asDiagonal() *
         es.eigenvectors().adjoint();
}

}  // namespace

TEST_CASE("density operator validation") {
  cmat ok(2, 2);
  ok << 0.75, 0.1, 0.1, 0.25;
  CHECK(DensityOperator(ok).spectrum().sum() == doctest::Approx(1.0).epsilon(1e-12));

  SUBCASE("non-Hermitian input is rejected") {
    cmat bad = ok;
    bad(0, 1) = 0.3;
    CHECK_THROWS(DensityOperator(bad));
  }
  SUBCASE("wrong trace is rejected") {
    CHECK_THROWS(DensityOperator(cmat::Identity(2, 2)));
  }
  SUBCASE("negative eigenvalues are rejected") {
    cmat bad(2, 2);
    bad << 1.2, 0.0, 0.0, -0.2;
    CHECK_THROWS(DensityOperator(bad));
  }
}

TEST_CASE("partial traces invert the tensor product") {
  std::mt19937_64 rng(1);
  const cmat a = random_density(rng, 2);
  const cmat b = random_density(rng, 3);
  const cmat ab = kron(a, b);
  CHECK((partial_trace_e(ab, 2, 3) - a).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((partial_trace_s(ab, 2, 3) - b).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(ab.trace().real() - 1.0) < 1e-12);
}

TEST_CASE("unitary step preserves trace and purity") {
  std::mt19937_64 rng(2);
  cmat h(4, 4);
  std::normal_distribution<double> g;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) h(i, j) = std::complex<double>(g(rng), g(rng));
  h = 0.5 * (h + h.adjoint()).eval();

  CompositeEvolver evolver(h, 1e-2);
  cmat rho = random_density(rng, 4);
  const double p0 = purity(rho);
  for (int i = 0; i < 100; ++i) evolver.apply(rho);
  CHECK(std::abs(rho.trace().real() - 1.0) < 1e-12);
  CHECK(purity(rho) == doctest::Approx(p0).epsilon(1e-12));
}

TEST_CASE("fidelity and Bures angle") {
  std::mt19937_64 rng(3);
  const DensityOperator rho(random_density(rng, 4));
  CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(bures_angle(rho, rho) == doctest::Approx(0.0).epsilon(1e-5));

  cmat e0 = cmat::Zero(2, 2), e1 = cmat::Zero(2, 2);
  e0(0, 0) = 1.0;
  e1(1, 1) = 1.0;
  CHECK(fidelity(DensityOperator(e0), DensityOperator(e1)) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(bures_angle(DensityOperator(e0), DensityOperator(e1)) ==
        doctest::Approx(std::numbers::pi / 2).epsilon(1e-10));

  SUBCASE("pure states reduce to the overlap") {
    cmat plus(2, 2);
    plus << 0.5, 0.5, 0.5, 0.5;
    CHECK(fidelity(DensityOperator(e0), DensityOperator(plus)) ==
          doctest::Approx(0.5).epsilon(1e-10));
  }
}

TEST_CASE("residual distance properties on random pairs") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> dims(2, 8);
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = dims(rng);
    const DensityOperator rho(random_density(rng, n));
    const DensityOperator sigma(random_density(rng, n));
    const double resid = residual_bures(rho, sigma);
    CHECK(resid <= bures_angle(rho, sigma) + 1e-10);

    const cmat u = random_unitary(rng, n);
    const DensityOperator rotated((u * rho.matrix() * u.adjoint()).eval());
    CHECK(residual_bures(rho, rotated) <= 1e-10);
  }
}

TEST_CASE("spectral rates agree with finite differences of the spectrum") {
  auto sys = make_qubit_env(0.5, 1.0, 0.8, 3);
  // Move off the degenerate initial point first.
  CompositeEvolver warm(sys.total_hamiltonian(), 0.3);
  warm.apply(sys.rho_se);

  const auto track = eigen_rates(sys);
  REQUIRE(track.reliable);

  const double h = 1e-5;
  CompositeEvolver fwd(sys.total_hamiltonian(), h);
  auto plus = sys;
  fwd.apply(plus.rho_se);
  const auto sp_plus = DensityOperator(partial_trace_e(plus.rho_se, 2, 3)).spectrum();
  const auto sp_0 = DensityOperator(partial_trace_e(sys.rho_se, 2, 3)).spectrum();
  for (Eigen::Index i = 0; i < sp_0.size(); ++i) {
    const double fd = (sp_plus(i) - sp_0(i)) / h;
    CHECK(std::abs(track.rates(i) - fd) < 1e-3);
  }
}

TEST_CASE("coupled qubits follow the Rabi law and saturate the bound") {
  const oracles::TwoQubitXX ora{1.0};
  QuantumRunOptions opts;
  opts.tau = 0.5;
  opts.dt = 1e-3;
  const auto res = run_open_quantum_experiment(make_two_qubit_xx(1.0), opts);
  for (const auto& c : res.report.checks) {
    INFO(c.name);
    CHECK(c.pass);
  }
  // Skip t = 0: the ground-state population is exactly extinct there and
  // its Fisher term is masked.
  for (std::size_t i = 1; i < res.series.size(); ++i) {
    if (std::isnan(res.series.fisher()[i])) continue;
    CHECK(res.series.fisher()[i] == doctest::Approx(ora.fisher(0)).epsilon(1e-6));
    CHECK(res.series.bound()[i] == doctest::Approx(4.0).epsilon(1e-10));
  }
  CHECK(res.purity_s.back() ==
        doctest::Approx(ora.purity_s(opts.tau)).epsilon(1e-8));
}

TEST_CASE("degenerate endpoints are carried by the bound integral") {
  QuantumRunOptions opts;
  opts.tau = std::numbers::pi / 4;  // ends exactly at the maximally mixed state
  opts.dt = 1e-3;
  const auto res = run_open_quantum_experiment(make_two_qubit_xx(1.0), opts);
  CHECK(res.degenerate_steps > 0);
  CHECK(res.series.total_bound_length() ==
        doctest::Approx(std::numbers::pi / 4).epsilon(1e-10));
  for (const auto& c : res.report.checks) {
    INFO(c.name);
    CHECK(c.pass);
  }
}

TEST_CASE("qubit with ladder environment passes all checks") {
  QuantumRunOptions opts;
  opts.tau = 2.0;
  opts.dt = 1e-3;
  opts.record_stride = 5;
  const auto res = run_open_quantum_experiment(make_qubit_env(0.5, 1.0, 0.8, 4), opts);
  for (const auto& c : res.report.checks) {
    INFO(c.name);
    CHECK(c.pass);
  }
  CHECK(res.series.total_bound_length() >= res.series.total_fisher_length() - 1e-9);
}
