#pragma once

#include <span>
#include <vector>

namespace bohmflow::numerics {

/// Composite trapezoid rule on a uniform grid.
double trapezoid(std::span<const double> f, double dx);

/// Trapezoid rule restricted to points where mask is true; a cell contributes
/// only when both of its end points are included.
double trapezoid_masked(std::span<const double> f, double dx, const std::vector<bool>& mask);

/// Running trapezoid integral, starting at zero.
std::vector<double> cumulative_trapezoid(std::span<const double> f, double dx);

}  // namespace bohmflow::numerics
