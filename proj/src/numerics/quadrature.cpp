#include "bohmflow/numerics/quadrature.hpp"

namespace bohmflow::numerics {

double trapezoid(std::span<const double> f, double dx) {
  if (f.size() < 2) return 0.0;
  double sum = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) sum += f[i];
  return sum * dx;
}

double trapezoid_masked(std::span<const double> f, double dx, const std::vector<bool>& mask) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    if (mask[i] && mask[i + 1]) sum += 0.5 * (f[i] + f[i + 1]);
  }
  return sum * dx;
}

std::vector<double> cumulative_trapezoid(std::span<const double> f, double dx) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t i = 1; i < f.size(); ++i) out[i] = out[i - 1] + 0.5 * dx * (f[i - 1] + f[i]);
  return out;
}

}  // namespace bohmflow::numerics
