#include "tfi/distributions.hpp"

#include <cmath>
#include <numeric>

namespace tfi {

DiscreteDistribution::DiscreteDistribution(std::vector<double> probs, double tol)
    : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("DiscreteDistribution: empty");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw std::invalid_argument("DiscreteDistribution: negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol)
    throw std::invalid_argument("DiscreteDistribution: sum " + std::to_string(sum) +
                                " not 1 within tolerance");
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (std::size_t s : shape) n *= s;
  return n;
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (double dx : spacing) v *= dx;
  return v;
}

bool GridSpec::compatible(const GridSpec& other) const {
  if (shape != other.shape) return false;
  for (std::size_t a = 0; a < ndim(); ++a) {
    if (std::abs(spacing[a] - other.spacing[a]) > 1e-14 * spacing[a]) return false;
    if (std::abs(origin[a] - other.origin[a]) > 1e-12) return false;
  }
  return true;
}

void GridSpec::validate() const {
  if (shape.empty() || shape.size() > 2)
    throw std::invalid_argument("GridSpec: only 1D/2D grids supported");
  if (origin.size() != shape.size() || spacing.size() != shape.size())
    throw std::invalid_argument("GridSpec: axis count mismatch");
  for (std::size_t a = 0; a < ndim(); ++a) {
    if (!(spacing[a] > 0.0)) throw std::invalid_argument("GridSpec: spacing must be positive");
    if (shape[a] < 2) throw std::invalid_argument("GridSpec: need at least 2 cells per axis");
  }
}

GridDensity::GridDensity(GridSpec grid, std::vector<double> values, double norm_tol)
    : grid_(std::move(grid)), values_(std::move(values)) {
  grid_.validate();
  if (values_.size() != grid_.size())
    throw std::invalid_argument("GridDensity: value count does not match grid");
  double mass = 0.0;
  for (double v : values_) {
    if (!(v >= 0.0)) throw std::invalid_argument("GridDensity: negative value");
    mass += v;
  }
  mass *= grid_.cell_volume();
  if (std::abs(mass - 1.0) > norm_tol)
    throw std::invalid_argument("GridDensity: mass " + std::to_string(mass) +
                                " not 1 within tolerance");
}

GridDensity gaussian_density_1d(const GridSpec& grid, double mean, double variance) {
  if (grid.shape.size() != 1) throw std::invalid_argument("gaussian_density_1d: grid not 1D");
  if (!(variance > 0.0)) throw std::invalid_argument("gaussian_density_1d: variance <= 0");
  std::vector<double> v(grid.shape[0]);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = grid.center(0, i);
    v[i] = std::exp(-0.5 * (x - mean) * (x - mean) / variance);
  }
  double mass = std::accumulate(v.begin(), v.end(), 0.0) * grid.spacing[0];
  for (double& x : v) x /= mass;
  return GridDensity(grid, std::move(v));
}

GridDensity uniform_density(const GridSpec& grid) {
  std::vector<double> v(grid.size(), 1.0 / (grid.size() * grid.cell_volume()));
  return GridDensity(grid, std::move(v));
}

GridDensity indicator_density_1d(const GridSpec& grid, double lo, double hi) {
  if (grid.shape.size() != 1) throw std::invalid_argument("indicator_density_1d: grid not 1D");
  if (!(hi > lo)) throw std::invalid_argument("indicator_density_1d: empty interval");
  std::vector<double> v(grid.shape[0], 0.0);
  double mass = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = grid.center(0, i);
    if (x >= lo && x < hi) {
      v[i] = 1.0;
      mass += grid.spacing[0];
    }
  }
  if (mass == 0.0) throw std::invalid_argument("indicator_density_1d: no cells inside interval");
  for (double& x : v) x /= mass;
  return GridDensity(grid, std::move(v));
}

}  // namespace tfi
