#include <doctest.h>

#include <cmath>
#include <random>

#include "tfi/markov.hpp"
#include "oracles.hpp"

using namespace tfi;
using namespace tfi::markov;

namespace {

// Random connected rate matrix with every edge bidirectional.
MarkovModel random_model(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.1, 2.0);
  std::bernoulli_distribution extra(0.5);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {  // chain backbone keeps it connected
    w(i + 1, i) = u(rng);
    w(i, i + 1) = u(rng);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 2; j < n; ++j)
      if (extra(rng)) {
        w(i, j) = u(rng);
        w(j, i) = u(rng);
      }
  for (int j = 0; j < n; ++j) w(j, j) = -(w.col(j).sum() - w(j, j));
  return MarkovModel(w);
}

Eigen::VectorXd random_probs(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; ++i) p(i) = u(rng);
  return p / p.sum();
}

}  // namespace

TEST_CASE("rate matrix validation") {
  SUBCASE("column sums must vanish") {
    Eigen::MatrixXd w(2, 2);
    w << -1.0, 0.5, 1.0, -0.6;
    CHECK_THROWS(MarkovModel(w));
  }
  SUBCASE("negative off-diagonal rates are rejected") {
    Eigen::MatrixXd w(2, 2);
    w << 1.0, 1.0, -1.0, -1.0;
    CHECK_THROWS(MarkovModel(w));
  }
  SUBCASE("one-way edges are rejected") {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
    w(1, 0) = 1.0;
    w(0, 0) = -1.0;
    w(2, 1) = 1.0;
    w(1, 1) = -1.0;
    w(1, 2) = 1.0;
    w(2, 2) = -1.0;
    CHECK_THROWS(MarkovModel(w));
  }
  SUBCASE("factories build valid generators") {
    CHECK(MarkovModel::two_state(1.0, 2.0).dim() == 2);
    CHECK(MarkovModel::ring(5, 1.0, 0.5).dim() == 5);
  }
}

TEST_CASE("symmetric two-state relaxation matches the closed form") {
  const oracles::TwoState ora{1.0};
  const auto model = MarkovModel::two_state(1.0, 1.0);
  auto state = make_state(model, DiscreteDistribution({1.0, 0.0}));
  const double dt = 1e-3;
  for (int i = 0; i < 1000; ++i) master_step(state, model, dt);
  CHECK(state.p(0) == doctest::Approx(ora.p0(1.0)).epsilon(1e-10));
  CHECK(state.p(1) == doctest::Approx(ora.p1(1.0)).epsilon(1e-10));
  CHECK(temporal_fisher(model, state.p) == doctest::Approx(ora.fisher(1.0)).epsilon(1e-10));
  CHECK(entropy_production_rate(model, state.p) ==
        doctest::Approx(ora.ep_rate(1.0)).epsilon(1e-10));
  CHECK(pseudo_entropy_production_rate(model, state.p) ==
        doctest::Approx(ora.pseudo_ep_rate(1.0)).epsilon(1e-10));
  CHECK(dynamical_activity_rate(model, state.p) ==
        doctest::Approx(ora.activity_rate(1.0)).epsilon(1e-10));
}

TEST_CASE("entropy production vanishes at detailed-balance equilibrium") {
  const auto model = MarkovModel::two_state(2.0, 1.0);
  // pi proportional to (k12, k21).
  Eigen::VectorXd pi(2);
  pi << 2.0 / 3.0, 1.0 / 3.0;
  CHECK(entropy_production_rate(model, pi) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(temporal_fisher(model, pi) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("rate hierarchy on random instances") {
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<int> dim(2, 6);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto model = random_model(rng, dim(rng));
    const auto p = random_probs(rng, model.dim());
    const double ep = entropy_production_rate(model, p);
    const double ps = pseudo_entropy_production_rate(model, p);
    const double act = dynamical_activity_rate(model, p);
    CHECK(ep >= ps - 1e-12);
    CHECK(ps >= -1e-12);
    CHECK(act >= 0.5 * ps - 1e-12);
  }
}

TEST_CASE("generator guard rejects oversized steps") {
  const auto model = MarkovModel::two_state(10.0, 10.0);
  auto state = make_state(model, DiscreteDistribution({0.7, 0.3}));
  CHECK_THROWS(master_step(state, model, 0.1));
}

TEST_CASE("experiment checks all pass for two-state relaxation") {
  const auto model = MarkovModel::two_state(1.0, 1.0);
  MarkovRunOptions opts;
  opts.tau = 2.0;
  opts.dt = 1e-3;
  const auto res = run_markov_experiment(model, DiscreteDistribution({1.0, 0.0}), opts);
  for (const auto& c : res.report.checks) {
    INFO(c.name);
    CHECK(c.pass);
  }
  // Same accumulation fed with the closed-form occupation.
  const oracles::TwoState ora{1.0};
  const double t0 = 10.0 * opts.dt;  // recording starts here by default
  const double expected_entropy =
      oracles::simpson([&](double t) { return ora.ep_rate(t); }, t0, 2.0);
  const double measured = res.entropy.back() - res.entropy.front();
  CHECK(measured == doctest::Approx(expected_entropy).epsilon(1e-4));
}

TEST_CASE("driven ring stays in the activity bound") {
  const auto model = MarkovModel::ring(6, 2.0, 0.5);
  MarkovRunOptions opts;
  opts.tau = 2.0;
  opts.dt = 1e-3;
  const auto res = run_markov_experiment(model, DiscreteDistribution({1, 0, 0, 0, 0, 0}), opts);
  for (const auto& c : res.report.checks) {
    INFO(c.name);
    CHECK(c.pass);
  }
  CHECK(res.activity.back() > 0.0);
}
