#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace bohmflow::numerics {

/// Points within this distance of a node have a stencil that touches it.
inline constexpr std::size_t kStencilRadius = 2;

/// First derivative: fourth-order central differences for 2 <= i <= n-3,
/// second-order central at i = 1 and n-2, second-order one-sided at the edges.
std::vector<double> first_derivative(std::span<const double> f, double dx);
std::vector<std::complex<double>> first_derivative(std::span<const std::complex<double>> f,
                                                   double dx);

/// Second derivative with the same order layout as first_derivative.
std::vector<double> second_derivative(std::span<const double> f, double dx);
std::vector<std::complex<double>> second_derivative(std::span<const std::complex<double>> f,
                                                    double dx);

/// Second derivative along one axis of a row-major n x n field.
/// axis 0 differentiates along the first index (rows), axis 1 along the second.
std::vector<double> second_derivative_2d(std::span<const double> f, std::size_t n, int axis,
                                         double dx);

}  // namespace bohmflow::numerics
