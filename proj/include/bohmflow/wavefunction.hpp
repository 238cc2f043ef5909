#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bohmflow/grid.hpp"
#include "bohmflow/potential.hpp"

namespace bohmflow {

using cplx = std::complex<double>;

namespace initial_states {

/// psi(x) ∝ exp(-(x - x0)^2 / (4 sigma0^2) + i k0 x); |psi|^2 has standard deviation sigma0.
struct Gaussian {
  double x0 = 0.0;
  double sigma0 = 1.0;
  double k0 = 0.0;
};

/// psi(x) ∝ exp(i k0 x), normalized over the box. Not confined.
struct PlaneWave {
  double k0 = 0.0;
};

/// n-th eigenfunction of the harmonic potential (requires a harmonic PotentialSpec).
struct HarmonicEigenstate {
  unsigned n = 0;
};

struct Tabulated {
  std::vector<cplx> values;
};

}  // namespace initial_states

using InitialStateSpec =
    std::variant<initial_states::Gaussian, initial_states::PlaneWave,
                 initial_states::HarmonicEigenstate, initial_states::Tabulated>;

std::string initial_state_name(const InitialStateSpec& spec);

/// Edge amplitude above this fraction of max|psi| counts as touching the boundary.
inline constexpr double kConfinementThreshold = 1e-6;

/// Complex field on a grid at one instant.
struct WavefunctionFrame {
  Grid1D grid;
  double time = 0.0;
  std::vector<cplx> values;

  std::size_t size() const noexcept { return values.size(); }
  std::span<const cplx> view() const noexcept { return values; }

  /// Trapezoid L2 norm squared, i.e. total probability.
  double norm() const;

  /// max(|psi(x_min)|, |psi(x_max)|) / max|psi|.
  double boundary_ratio() const;

  bool confined(double threshold = kConfinementThreshold) const {
    return boundary_ratio() < threshold;
  }

  std::vector<double> density() const;
};

/// Throws InvalidArgument for inconsistent specs, under-resolved Gaussians
/// (sigma0 < 3 dx) and ConfinementError for Gaussians touching the boundary.
/// The result is normalized to one and has time zero.
WavefunctionFrame init_wavefunction(const InitialStateSpec& spec, const Grid1D& grid,
                                    const PhysicalUnits& units = {},
                                    const PotentialSpec& potential = potentials::Free{});

/// Scales values so the trapezoid norm is one. Throws NumericalError for a zero field.
void normalize(WavefunctionFrame& frame);

/// Closed-form harmonic-oscillator eigenfunction, orthonormal on the real line.
double hermite_function(unsigned n, double x, double mass, double omega, double hbar);

}  // namespace bohmflow
