#pragma once

#include <span>
#include <vector>

namespace bohmflow::numerics {

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

/// Removes 2*pi jumps sweeping left to right. Points with skip[i] set are not
/// used as references: the next kept point is unwrapped against the last kept one,
/// and skipped points are continued from the last kept value.
std::vector<double> unwrap_phase(std::span<const double> wrapped, const std::vector<bool>& skip);

std::vector<double> unwrap_phase(std::span<const double> wrapped);

}  // namespace bohmflow::numerics
