#include "tfi/info_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tfi {

namespace {

// arccos(1 - s) written as 2 asin(sqrt(s/2)): evaluating the squared
// Hellinger distance s = (1/2) sum (sqrt p - sqrt q)^2 directly avoids
// the catastrophic cancellation of 1 - sum sqrt(pq) for nearby
// distributions, where acos near 1 would amplify round-off to ~1e-8.
double arccos_from_hellinger(double s) {
  s = std::min(2.0, std::max(0.0, s));
  return 2.0 * std::asin(std::sqrt(0.5 * s));
}

}  // namespace

double temporal_fisher_discrete(std::span<const double> p,
                                std::span<const double> dp_dt, double floor) {
  if (p.size() != dp_dt.size())
    throw std::invalid_argument("temporal_fisher_discrete: dimension mismatch");
  double sum = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sum += dp_dt[i];
    if (p[i] >= floor) acc += dp_dt[i] * dp_dt[i] / p[i];
  }
  if (std::abs(sum) > 1e-10)
    throw std::invalid_argument("temporal_fisher_discrete: dp/dt does not sum to zero");
  return acc;
}

double temporal_fisher_discrete(const DiscreteDistribution& p,
                                std::span<const double> dp_dt) {
  return temporal_fisher_discrete(std::span<const double>(p.probs()), dp_dt);
}

double temporal_fisher_grid(const GridDensity& p, std::span<const double> dp_dt) {
  if (dp_dt.size() != p.size())
    throw std::invalid_argument("temporal_fisher_grid: grid shape mismatch");
  const double vol = p.grid().cell_volume();
  const double floor = p.density_floor();
  double total = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    total += dp_dt[i];
    if (p[i] >= floor) acc += dp_dt[i] * dp_dt[i] / p[i];
  }
  if (std::abs(total * vol) > 1e-8)
    throw std::invalid_argument("temporal_fisher_grid: d_t p does not integrate to zero");
  return acc * vol;
}

double bhattacharyya_arccos(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw std::invalid_argument("bhattacharyya_arccos: dimension mismatch");
  double hell = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
    hell += 0.5 * d * d;
  }
  return arccos_from_hellinger(hell);
}

double bhattacharyya_arccos(const DiscreteDistribution& p,
                            const DiscreteDistribution& q) {
  return bhattacharyya_arccos(std::span<const double>(p.probs()),
                              std::span<const double>(q.probs()));
}

double bhattacharyya_arccos_grid(const GridDensity& p, const GridDensity& q) {
  if (!p.grid().compatible(q.grid()))
    throw std::invalid_argument("bhattacharyya_arccos_grid: grid mismatch");
  const double vol = p.grid().cell_volume();
  double hell = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
    hell += 0.5 * d * d;
  }
  return arccos_from_hellinger(hell * vol);
}

namespace {

// CDF at cell edges; F[0] = 0, F[n] = 1 (rescaled to kill round-off drift).
std::vector<double> edge_cdf(const GridDensity& d) {
  const double dx = d.grid().spacing[0];
  std::vector<double> f(d.size() + 1, 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) f[i + 1] = f[i] + d[i] * dx;
  const double total = f.back();
  for (double& v : f) v /= total;
  return f;
}

double quantile(const std::vector<double>& f, const GridSpec& g, double u) {
  const double dx = g.spacing[0];
  auto it = std::upper_bound(f.begin(), f.end(), u);
  std::size_t i = it == f.begin() ? 0 : static_cast<std::size_t>(it - f.begin()) - 1;
  if (i >= f.size() - 1) i = f.size() - 2;
  // Skip zero-mass cells so the interpolation slope is finite.
  while (i + 1 < f.size() - 1 && f[i + 1] <= u && f[i + 1] == f[i]) ++i;
  const double df = f[i + 1] - f[i];
  const double frac = df > 0.0 ? (u - f[i]) / df : 0.0;
  return g.origin[0] + (static_cast<double>(i) + frac) * dx;
}

}  // namespace

double wasserstein_1d(const GridDensity& p, const GridDensity& q) {
  if (p.grid().ndim() != 1 || q.grid().ndim() != 1)
    throw std::invalid_argument("wasserstein_1d: grids must be 1D");
  if (!p.grid().compatible(q.grid()))
    throw std::invalid_argument("wasserstein_1d: grid mismatch");
  const auto fp = edge_cdf(p);
  const auto fq = edge_cdf(q);
  // Both quantile functions are piecewise linear with breakpoints at the
  // edge CDF values; Simpson is exact on each merged subinterval.
  std::vector<double> breaks;
  breaks.reserve(fp.size() + fq.size());
  breaks.insert(breaks.end(), fp.begin(), fp.end());
  breaks.insert(breaks.end(), fq.begin(), fq.end());
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  double acc = 0.0;
  auto sq = [](double x) { return x * x; };
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double a = breaks[k], b = breaks[k + 1];
    if (b <= a) continue;
    const double m = 0.5 * (a + b);
    const double fa = sq(quantile(fp, p.grid(), a) - quantile(fq, q.grid(), a));
    const double fm = sq(quantile(fp, p.grid(), m) - quantile(fq, q.grid(), m));
    const double fb = sq(quantile(fp, p.grid(), b) - quantile(fq, q.grid(), b));
    acc += (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  }
  return acc;
}

double tau_min(double distance, double avg_sqrt_bound) {
  if (!(avg_sqrt_bound > 0.0))
    throw std::invalid_argument("tau_min: average bound must be positive");
  return 2.0 * distance / avg_sqrt_bound;
}

void BoundSeries::push(double t, double fisher, double bound, bool has_fisher) {
  if (!times_.empty() && !(t > times_.back()))
    throw std::invalid_argument("BoundSeries: non-monotone time");
  if (has_fisher && !(fisher >= 0.0))
    throw std::invalid_argument("BoundSeries: negative fisher value");
  if (!(bound >= 0.0)) throw std::invalid_argument("BoundSeries: negative bound value");

  double flen = times_.empty() ? 0.0 : fisher_len_.back();
  double blen = times_.empty() ? 0.0 : bound_len_.back();
  if (!times_.empty()) {
    const double dt = t - times_.back();
    blen += 0.25 * dt * (std::sqrt(bound_.back()) + std::sqrt(bound));
    if (has_fisher && last_has_fisher_)
      flen += 0.25 * dt * (std::sqrt(fisher_.back()) + std::sqrt(fisher));
  }
  if (!has_fisher) ++skipped_;
  times_.push_back(t);
  fisher_.push_back(has_fisher ? fisher : std::numeric_limits<double>::quiet_NaN());
  bound_.push_back(bound);
  fisher_len_.push_back(flen);
  bound_len_.push_back(blen);
  last_has_fisher_ = has_fisher;
}

void BoundSeries::append(double t, double fisher, double bound) {
  push(t, fisher, bound, true);
}

void BoundSeries::append_bound_only(double t, double bound) {
  push(t, 0.0, bound, false);
}

CheckResult check_ge(const std::string& name, double lhs, double rhs, double tol) {
  CheckResult c;
  c.name = name;
  c.lhs = lhs;
  c.rhs = rhs;
  c.slack = lhs - rhs;
  c.tolerance = tol;
  c.pass = std::isfinite(lhs) && std::isfinite(rhs) && c.slack >= -tol;
  return c;
}

CheckResult check_speed_limit(const std::string& name, double bound_length,
                              double distance, double tol) {
  return check_ge(name, bound_length, distance, tol);
}

bool VerificationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.pass; });
}

}  // namespace tfi
