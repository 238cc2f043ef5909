#pragma once

#include <cstddef>
#include <vector>

namespace bohmflow {

/// Uniform one-dimensional grid on [x_min, x_max] including both end points.
class Grid1D {
 public:
  static constexpr std::size_t kMinPoints = 16;

  /// Throws InvalidArgument unless x_max > x_min and n_points >= kMinPoints.
  Grid1D(double x_min, double x_max, std::size_t n_points);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t size() const noexcept { return n_; }
  double dx() const noexcept { return dx_; }
  double length() const noexcept { return x_max_ - x_min_; }

  double x(std::size_t i) const noexcept {
    if (i + 1 == n_) return x_max_;
    return x_min_ + (x_max_ - x_min_) * (static_cast<double>(i) / static_cast<double>(n_ - 1));
  }

  std::vector<double> points() const;

  /// Index of the cell [x(i), x(i+1)] containing x, clamped to [0, n-2].
  std::size_t cell_index(double x) const noexcept;

  bool contains(double x) const noexcept { return x >= x_min_ && x <= x_max_; }

  /// Same bounds with (n - 1) doubled, i.e. dx halved exactly.
  Grid1D refined() const { return Grid1D(x_min_, x_max_, 2 * n_ - 1); }

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double dx_;
};

Grid1D build_grid(double x_min, double x_max, std::size_t n_points);

/// Reduced Planck constant and particle mass. Natural units by default.
struct PhysicalUnits {
  double hbar = 1.0;
  double mass = 1.0;

  /// Throws InvalidArgument unless both are strictly positive and finite.
  void validate() const;

  friend bool operator==(const PhysicalUnits&, const PhysicalUnits&) = default;
};

}  // namespace bohmflow
