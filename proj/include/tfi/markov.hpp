#ifndef TFI_MARKOV_HPP
#define TFI_MARKOV_HPP

#include <Eigen/Dense>

#include "tfi/info_geometry.hpp"

namespace tfi::markov {

// Time-independent rate matrix W; W(i, j) is the jump rate j -> i,
// columns sum to zero, and every edge is bidirectional (required for the
// entropy-production logarithm).
class MarkovModel {
public:
  explicit MarkovModel(Eigen::MatrixXd rates);

  int dim() const { return static_cast<int>(rates_.rows()); }
  const Eigen::MatrixXd& rates() const { return rates_; }
  double max_exit_rate() const;

  static MarkovModel two_state(double k12, double k21);
  static MarkovModel ring(int n, double forward, double backward);

private:
  Eigen::MatrixXd rates_;
};

struct MarkovState {
  Eigen::VectorXd p;
  double time = 0.0;
  double entropy = 0.0;         // Sigma(t)
  double pseudo_entropy = 0.0;  // Sigma_ps(t)
  double activity = 0.0;        // A(t)
  double r_ep = 0.0, r_ps = 0.0, r_act = 0.0;
  bool has_rates = false;
};

MarkovState make_state(const MarkovModel& model, const DiscreteDistribution& initial);

double entropy_production_rate(const MarkovModel& model, const Eigen::VectorXd& p);
double pseudo_entropy_production_rate(const MarkovModel& model, const Eigen::VectorXd& p);
double dynamical_activity_rate(const MarkovModel& model, const Eigen::VectorXd& p);

double lambda_markov(double accumulated_entropy, double t);          // Sigma / (2 t^2)
double lambda_markov_activity(double accumulated_activity, double t); // A / t^2

// One RK4 step of p-dot = W p; requires dt * max|W_ii| <= 0.1.
void master_step(MarkovState& state, const MarkovModel& model, double dt);

double temporal_fisher(const MarkovModel& model, const Eigen::VectorXd& p);

struct MarkovRunOptions {
  double tau = 1.0;
  double dt = 1e-3;
  double t0 = -1.0;  // < 0 means 10*dt
  std::size_t record_stride = 1;
  double pointwise_rel_tol = 1e-6;
  double pointwise_abs_tol = 1e-9;
  double integrated_tol = 1e-4;
};

struct MarkovRunResult {
  BoundSeries ep_series;        // bound = Lambda_MA
  BoundSeries activity_series;  // bound = Lambda'_MA
  std::vector<double> entropy, pseudo_entropy, activity;  // at recorded times
  VerificationReport report;
  Eigen::VectorXd initial_p, final_p;
};

MarkovRunResult run_markov_experiment(const MarkovModel& model,
                                      const DiscreteDistribution& initial,
                                      const MarkovRunOptions& opts);

}  // namespace tfi::markov

#endif
