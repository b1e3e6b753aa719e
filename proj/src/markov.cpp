#include "tfi/markov.hpp"

#include <cmath>
#include <stdexcept>

namespace tfi::markov {

MarkovModel::MarkovModel(Eigen::MatrixXd rates) : rates_(std::move(rates)) {
  const auto n = rates_.rows();
  if (n < 2 || rates_.cols() != n)
    throw std::invalid_argument("MarkovModel: rate matrix must be square, n >= 2");
  for (Eigen::Index j = 0; j < n; ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i != j && rates_(i, j) < 0.0)
        throw std::invalid_argument("MarkovModel: negative off-diagonal rate");
      col += rates_(i, j);
    }
    if (std::abs(col) > 1e-10)
      throw std::invalid_argument("MarkovModel: column sums must vanish");
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      if ((rates_(i, j) > 0.0) != (rates_(j, i) > 0.0))
        throw std::invalid_argument("MarkovModel: unidirectional edge (EP log undefined)");
}

double MarkovModel::max_exit_rate() const {
  double m = 0.0;
  for (Eigen::Index i = 0; i < rates_.rows(); ++i) m = std::max(m, -rates_(i, i));
  return m;
}

MarkovModel MarkovModel::two_state(double k12, double k21) {
  // k12: rate 2 -> 1, k21: rate 1 -> 2.
  Eigen::MatrixXd w(2, 2);
  w << -k21, k12, k21, -k12;
  return MarkovModel(w);
}

MarkovModel MarkovModel::ring(int n, double forward, double backward) {
  if (n < 3) throw std::invalid_argument("MarkovModel::ring: need n >= 3");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    const int next = (j + 1) % n;
    w(next, j) += forward;
    w(j, next) += backward;
  }
  for (int j = 0; j < n; ++j) {
    w(j, j) = 0.0;
    w(j, j) = -w.col(j).sum();
  }
  return MarkovModel(w);
}

MarkovState make_state(const MarkovModel& model, const DiscreteDistribution& initial) {
  if (static_cast<int>(initial.dim()) != model.dim())
    throw std::invalid_argument("make_state: dimension mismatch");
  MarkovState s;
  s.p = Eigen::Map<const Eigen::VectorXd>(initial.probs().data(),
                                          static_cast<Eigen::Index>(initial.dim()));
  s.r_ep = entropy_production_rate(model, s.p);
  s.r_ps = pseudo_entropy_production_rate(model, s.p);
  s.r_act = dynamical_activity_rate(model, s.p);
  s.has_rates = true;
  return s;
}

double entropy_production_rate(const MarkovModel& model, const Eigen::VectorXd& p) {
  const auto& w = model.rates();
  const int n = model.dim();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || w(i, j) <= 0.0) continue;
      // Extinction mask: both probabilities must sit above the floor,
      // x ln x -> 0 for a vanishing flow.
      if (p(j) < kProbFloor || p(i) < kProbFloor) continue;
      const double a = w(i, j) * p(j);
      const double b = w(j, i) * p(i);
      acc += a * std::log(a / b);
    }
  }
  return acc;
}

double pseudo_entropy_production_rate(const MarkovModel& model, const Eigen::VectorXd& p) {
  const auto& w = model.rates();
  const int n = model.dim();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      if (w(i, j) <= 0.0) continue;
      if (p(j) < kProbFloor && p(i) < kProbFloor) continue;
      const double a = w(i, j) * p(j);
      const double b = w(j, i) * p(i);
      if (a + b <= 0.0) continue;
      acc += 2.0 * (a - b) * (a - b) / (a + b);
    }
  }
  return acc;
}

double dynamical_activity_rate(const MarkovModel& model, const Eigen::VectorXd& p) {
  const auto& w = model.rates();
  const int n = model.dim();
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) acc += w(i, j) * p(j);
  return acc;
}

double lambda_markov(double accumulated_entropy, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("lambda_markov: requires t > 0");
  return accumulated_entropy / (2.0 * t * t);
}

double lambda_markov_activity(double accumulated_activity, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("lambda_markov_activity: requires t > 0");
  return accumulated_activity / (t * t);
}

void master_step(MarkovState& state, const MarkovModel& model, double dt) {
  if (!(dt > 0.0) || dt * model.max_exit_rate() > 0.1 + 1e-12)
    throw std::invalid_argument("master_step: dt * max|W_ii| exceeds 0.1");
  if (!state.has_rates) {
    state.r_ep = entropy_production_rate(model, state.p);
    state.r_ps = pseudo_entropy_production_rate(model, state.p);
    state.r_act = dynamical_activity_rate(model, state.p);
    state.has_rates = true;
  }
  const auto& w = model.rates();
  const Eigen::VectorXd k1 = w * state.p;
  const Eigen::VectorXd k2 = w * (state.p + 0.5 * dt * k1);
  const Eigen::VectorXd k3 = w * (state.p + 0.5 * dt * k2);
  const Eigen::VectorXd k4 = w * (state.p + dt * k3);
  state.p += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  const double ep = entropy_production_rate(model, state.p);
  const double ps = pseudo_entropy_production_rate(model, state.p);
  const double act = dynamical_activity_rate(model, state.p);
  state.entropy += 0.5 * dt * (state.r_ep + ep);
  state.pseudo_entropy += 0.5 * dt * (state.r_ps + ps);
  state.activity += 0.5 * dt * (state.r_act + act);
  state.r_ep = ep;
  state.r_ps = ps;
  state.r_act = act;
  state.time += dt;
}

double temporal_fisher(const MarkovModel& model, const Eigen::VectorXd& p) {
  const Eigen::VectorXd dp = model.rates() * p;
  return temporal_fisher_discrete(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())),
                                  std::span<const double>(dp.data(), static_cast<std::size_t>(dp.size())));
}

MarkovRunResult run_markov_experiment(const MarkovModel& model,
                                      const DiscreteDistribution& initial,
                                      const MarkovRunOptions& opts) {
  if (!(opts.tau > 0.0) || !(opts.dt > 0.0))
    throw std::invalid_argument("run_markov_experiment: tau and dt must be positive");
  const double t0 = opts.t0 < 0.0 ? 10.0 * opts.dt : opts.t0;
  if (!(opts.tau > t0)) throw std::invalid_argument("run_markov_experiment: tau <= t0");

  MarkovState state = make_state(model, initial);
  MarkovRunResult res;
  res.initial_p = state.p;

  Eigen::VectorXd first_recorded;
  const std::size_t n_steps = static_cast<std::size_t>(std::ceil(opts.tau / opts.dt - 1e-9));
  const std::size_t stride = std::max<std::size_t>(1, opts.record_stride);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double dt = std::min(opts.dt, opts.tau - state.time);
    master_step(state, model, dt);
    const bool last = k + 1 == n_steps;
    if (state.time + 1e-12 >= t0 && (k % stride == 0 || last)) {
      const double fisher = temporal_fisher(model, state.p);
      res.ep_series.append(state.time, fisher, lambda_markov(state.entropy, state.time));
      res.activity_series.append(state.time, fisher,
                                 lambda_markov_activity(state.activity, state.time));
      res.entropy.push_back(state.entropy);
      res.pseudo_entropy.push_back(state.pseudo_entropy);
      res.activity.push_back(state.activity);
      if (first_recorded.size() == 0) first_recorded = state.p;
    }
  }
  res.final_p = state.p;

  auto span_of = [](const Eigen::VectorXd& v) {
    return std::span<const double>(v.data(), static_cast<std::size_t>(v.size()));
  };
  const double distance = bhattacharyya_arccos(span_of(res.initial_p), span_of(res.final_p));

  auto pointwise_margin = [&](const BoundSeries& s) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.size(); ++i)
      m = std::min(m, s.bound()[i] * (1.0 + opts.pointwise_rel_tol) + opts.pointwise_abs_tol -
                          s.fisher()[i]);
    return m;
  };
  auto& rep = res.report;
  rep.add(check_ge("fisher_le_lambda_ep_pointwise", pointwise_margin(res.ep_series), 0.0, 0.0));
  rep.add(check_ge("fisher_le_lambda_activity_pointwise", pointwise_margin(res.activity_series),
                   0.0, 0.0));
  rep.add(check_speed_limit("speed_limit_entropy", res.ep_series.total_bound_length(), distance,
                            opts.integrated_tol));
  rep.add(check_speed_limit("speed_limit_activity", res.activity_series.total_bound_length(),
                            distance, opts.integrated_tol));
  rep.add(check_speed_limit("wootters_fisher_length", res.ep_series.total_fisher_length(),
                            bhattacharyya_arccos(span_of(first_recorded), span_of(res.final_p)),
                            opts.integrated_tol));
  rep.note("normalization_drift", std::abs(state.p.sum() - 1.0));
  rep.note("distance", distance);
  rep.note("pseudo_entropy_final", state.pseudo_entropy);
  return res;
}

}  // namespace tfi::markov
