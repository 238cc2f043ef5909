#include "bohmflow/wavefunction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bohmflow/detail/overloaded.hpp"
#include "bohmflow/errors.hpp"
#include "bohmflow/numerics/quadrature.hpp"

namespace bohmflow {

using detail::Overloaded;

std::string initial_state_name(const InitialStateSpec& spec) {
  return std::visit(
      Overloaded{
          [](const initial_states::Gaussian&) { return std::string("gaussian"); },
          [](const initial_states::PlaneWave&) { return std::string("plane_wave"); },
          [](const initial_states::HarmonicEigenstate&) {
            return std::string("harmonic_eigenstate");
          },
          [](const initial_states::Tabulated&) { return std::string("tabulated"); },
      },
      spec);
}

double WavefunctionFrame::norm() const {
  return numerics::trapezoid(density(), grid.dx());
}

double WavefunctionFrame::boundary_ratio() const {
  double peak = 0.0;
  for (const auto& v : values) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return 0.0;
  return std::max(std::abs(values.front()), std::abs(values.back())) / peak;
}

std::vector<double> WavefunctionFrame::density() const {
  std::vector<double> p(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) p[i] = std::norm(values[i]);
  return p;
}

void normalize(WavefunctionFrame& frame) {
  const double n = frame.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw NumericalError("cannot normalize a zero or non-finite field");
  const double s = 1.0 / std::sqrt(n);
  for (auto& v : frame.values) v *= s;
}

double hermite_function(unsigned n, double x, double mass, double omega, double hbar) {
  // Normalized three-term recurrence; avoids overflow of raw Hermite polynomials.
  const double scale = std::sqrt(mass * omega / hbar);
  const double xi = scale * x;
  double prev = 0.0;
  double cur = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * xi * xi);
  for (unsigned k = 1; k <= n; ++k) {
    const double next = std::sqrt(2.0 / k) * xi * cur - std::sqrt((k - 1.0) / k) * prev;
    prev = cur;
    cur = next;
  }
  return cur * std::sqrt(scale);
}

WavefunctionFrame init_wavefunction(const InitialStateSpec& spec, const Grid1D& grid,
                                    const PhysicalUnits& units, const PotentialSpec& potential) {
  units.validate();
  const std::size_t n = grid.size();
  WavefunctionFrame frame{grid, 0.0, std::vector<cplx>(n)};
  bool must_confine = true;

  std::visit(
      Overloaded{
          [&](const initial_states::Gaussian& g) {
            if (!(g.sigma0 > 0.0)) throw InvalidArgument("gaussian sigma0 must be positive");
            if (g.sigma0 < 3.0 * grid.dx())
              throw InvalidArgument("gaussian sigma0 = " + std::to_string(g.sigma0) +
                                    " is under-resolved (needs >= 3 dx = " +
                                    std::to_string(3.0 * grid.dx()) + ")");
            const double amp = std::pow(2.0 * std::numbers::pi * g.sigma0 * g.sigma0, -0.25);
            for (std::size_t i = 0; i < n; ++i) {
              const double x = grid.x(i);
              const double u = x - g.x0;
              frame.values[i] = amp * std::exp(cplx(-u * u / (4.0 * g.sigma0 * g.sigma0), g.k0 * x));
            }
          },
          [&](const initial_states::PlaneWave& p) {
            must_confine = false;
            for (std::size_t i = 0; i < n; ++i)
              frame.values[i] = std::exp(cplx(0.0, p.k0 * grid.x(i)));
          },
          [&](const initial_states::HarmonicEigenstate& h) {
            const auto* osc = std::get_if<potentials::Harmonic>(&potential);
            if (osc == nullptr)
              throw InvalidArgument("harmonic_eigenstate requires a harmonic potential");
            for (std::size_t i = 0; i < n; ++i)
              frame.values[i] = hermite_function(h.n, grid.x(i), units.mass, osc->omega, units.hbar);
          },
          [&](const initial_states::Tabulated& t) {
            if (t.values.size() != n)
              throw InvalidArgument("tabulated initial state has " + std::to_string(t.values.size()) +
                                    " values, grid has " + std::to_string(n));
            frame.values = t.values;
          },
      },
      spec);

  for (const auto& v : frame.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NumericalError("initial state contains non-finite values");

  normalize(frame);
  if (must_confine && !frame.confined()) {
    throw ConfinementError("initial " + initial_state_name(spec) +
                               " touches the grid boundary (edge/max amplitude ratio " +
                               std::to_string(frame.boundary_ratio()) + ")",
                           0.0);
  }
  return frame;
}

}  // namespace bohmflow
