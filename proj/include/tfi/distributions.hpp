#ifndef TFI_DISTRIBUTIONS_HPP
#define TFI_DISTRIBUTIONS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tfi {

// Terms with probability below this floor are dropped from Fisher sums;
// (dp)^2/p is 0/0 at extinction.  For densities the floor is scaled by
// the inverse cell volume.
inline constexpr double kProbFloor = 1e-12;

class DiscreteDistribution {
public:
  explicit DiscreteDistribution(std::vector<double> probs, double tol = 1e-12);

  std::size_t dim() const { return probs_.size(); }
  const std::vector<double>& probs() const { return probs_; }
  double operator[](std::size_t i) const { return probs_[i]; }

private:
  std::vector<double> probs_;
};

enum class Boundary { reflecting, periodic };

// Uniform rectangular grid, 1 or 2 axes.  Cell i covers
// [origin + i*dx, origin + (i+1)*dx); values live at cell centers.
struct GridSpec {
  std::vector<double> origin;
  std::vector<double> spacing;
  std::vector<std::size_t> shape;
  Boundary boundary = Boundary::reflecting;

  std::size_t ndim() const { return shape.size(); }
  std::size_t size() const;
  double cell_volume() const;
  double center(std::size_t axis, std::size_t i) const {
    return origin[axis] + (static_cast<double>(i) + 0.5) * spacing[axis];
  }
  bool compatible(const GridSpec& other) const;
  void validate() const;
};

class GridDensity {
public:
  GridDensity(GridSpec grid, std::vector<double> values, double norm_tol = 1e-8);

  const GridSpec& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  double density_floor() const { return kProbFloor / grid_.cell_volume(); }

private:
  GridSpec grid_;
  std::vector<double> values_;
};

GridDensity gaussian_density_1d(const GridSpec& grid, double mean, double variance);
GridDensity uniform_density(const GridSpec& grid);
// Normalized indicator of [lo, hi).
GridDensity indicator_density_1d(const GridSpec& grid, double lo, double hi);

}  // namespace tfi

#endif
