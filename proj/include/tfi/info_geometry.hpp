#ifndef TFI_INFO_GEOMETRY_HPP
#define TFI_INFO_GEOMETRY_HPP

#include <span>
#include <string>
#include <vector>

#include "tfi/distributions.hpp"

namespace tfi {

// sum_i (dp_i/dt)^2 / p_i over entries with p_i >= kProbFloor.
double temporal_fisher_discrete(const DiscreteDistribution& p,
                                std::span<const double> dp_dt);
double temporal_fisher_discrete(std::span<const double> p,
                                std::span<const double> dp_dt,
                                double floor = kProbFloor);

// Riemann-sum approximation of int (d_t p)^2 / p d^n x.
double temporal_fisher_grid(const GridDensity& p, std::span<const double> dp_dt);

// arccos(sum_i sqrt(p_i q_i)), argument clamped to [0, 1].
double bhattacharyya_arccos(const DiscreteDistribution& p,
                            const DiscreteDistribution& q);
double bhattacharyya_arccos(std::span<const double> p, std::span<const double> q);
double bhattacharyya_arccos_grid(const GridDensity& p, const GridDensity& q);

// Squared 2-Wasserstein distance between 1D grid densities via the
// monotone quantile coupling; exact for piecewise-linear CDFs.
double wasserstein_1d(const GridDensity& p, const GridDensity& q);

// tau >= 2 L / mean(sqrt(Lambda)).
double tau_min(double distance, double avg_sqrt_bound);

// Time series of (t, fisher, bound) samples with running length integrals
// (1/2) int sqrt(fisher) dt and (1/2) int sqrt(bound) dt (trapezoidal).
// Samples may carry a bound value only (fisher unavailable, e.g. a
// degenerate-spectrum step); the fisher length then skips that interval.
class BoundSeries {
public:
  void append(double t, double fisher, double bound);
  void append_bound_only(double t, double bound);

  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& fisher() const { return fisher_; }
  const std::vector<double>& bound() const { return bound_; }
  const std::vector<double>& fisher_length() const { return fisher_len_; }
  const std::vector<double>& bound_length() const { return bound_len_; }
  double total_fisher_length() const { return fisher_len_.empty() ? 0.0 : fisher_len_.back(); }
  double total_bound_length() const { return bound_len_.empty() ? 0.0 : bound_len_.back(); }
  std::size_t skipped_fisher_samples() const { return skipped_; }

private:
  void push(double t, double fisher, double bound, bool has_fisher);

  std::vector<double> times_, fisher_, bound_, fisher_len_, bound_len_;
  bool last_has_fisher_ = false;
  std::size_t skipped_ = 0;
};

struct CheckResult {
  std::string name;
  double lhs = 0;
  double rhs = 0;
  double slack = 0;
  double tolerance = 0;
  bool pass = false;
};

// pass iff lhs >= rhs - tol; NaN anywhere fails.
CheckResult check_ge(const std::string& name, double lhs, double rhs, double tol);
// Speed-limit form: bound_length >= distance - tol.
CheckResult check_speed_limit(const std::string& name, double bound_length,
                              double distance, double tol);

struct VerificationReport {
  std::string scenario;
  std::vector<CheckResult> checks;
  std::vector<std::pair<std::string, double>> diagnostics;

  void add(CheckResult c) { checks.push_back(std::move(c)); }
  void note(const std::string& key, double value) { diagnostics.emplace_back(key, value); }
  bool all_pass() const;
};

}  // namespace tfi

#endif
