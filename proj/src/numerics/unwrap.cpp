#include "bohmflow/numerics/unwrap.hpp"

#include <cmath>
#include <numbers>

namespace bohmflow::numerics {

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(a, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

std::vector<double> unwrap_phase(std::span<const double> wrapped, const std::vector<bool>& skip) {
  std::vector<double> out(wrapped.size());
  bool have_ref = false;
  double ref_wrapped = 0.0;
  double ref_unwrapped = 0.0;
  for (std::size_t i = 0; i < wrapped.size(); ++i) {
    if (!have_ref) {
      out[i] = wrapped[i];
      if (!skip[i]) {
        have_ref = true;
        ref_wrapped = wrapped[i];
        ref_unwrapped = wrapped[i];
      }
      continue;
    }
    out[i] = ref_unwrapped + wrap_angle(wrapped[i] - ref_wrapped);
    if (!skip[i]) {
      ref_wrapped = wrapped[i];
      ref_unwrapped = out[i];
    }
  }
  return out;
}

std::vector<double> unwrap_phase(std::span<const double> wrapped) {
  return unwrap_phase(wrapped, std::vector<bool>(wrapped.size(), false));
}

}  // namespace bohmflow::numerics
