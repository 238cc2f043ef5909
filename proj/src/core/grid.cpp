#include "bohmflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bohmflow/errors.hpp"

namespace bohmflow {

Grid1D::Grid1D(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_(n_points), dx_(0.0) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
    throw InvalidArgument("grid bounds must satisfy x_max > x_min (got [" + std::to_string(x_min) +
                          ", " + std::to_string(x_max) + "])");
  }
  if (n_points < kMinPoints) {
    throw InvalidArgument("grid needs at least " + std::to_string(kMinPoints) + " points (got " +
                          std::to_string(n_points) + ")");
  }
  dx_ = (x_max - x_min) / static_cast<double>(n_points - 1);
}

std::vector<double> Grid1D::points() const {
  std::vector<double> xs(n_);
  for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
  return xs;
}

std::size_t Grid1D::cell_index(double x) const noexcept {
  const double s = (x - x_min_) / dx_;
  if (!(s > 0.0)) return 0;
  const auto i = static_cast<std::size_t>(s);
  return std::min(i, n_ - 2);
}

Grid1D build_grid(double x_min, double x_max, std::size_t n_points) {
  return Grid1D(x_min, x_max, n_points);
}

void PhysicalUnits::validate() const {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidArgument("hbar must be positive");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidArgument("mass must be positive");
}

}  // namespace bohmflow
