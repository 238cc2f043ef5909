#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bohmflow/config.hpp"
#include "bohmflow/grid.hpp"
#include "bohmflow/wavefunction.hpp"

namespace bohmflow {

/// Points where R <= node_epsilon * max R, or where the phase turns by more
/// than pi/2 towards a neighbour (a sign change between samples of a real
/// field never produces a small sample, so it is caught this way).
std::vector<bool> node_points(std::span<const cplx> psi, double node_epsilon);

/// valid[i] is true when no node point lies within the stencil radius of i,
/// so every difference stencil centred at i sees a smooth, non-vanishing field.
std::vector<bool> valid_mask(std::span<const cplx> psi, double node_epsilon);

struct PolarFields {
  std::vector<double> R;
  /// Action, S = hbar * unwrapped phase, zero at the point of max R.
  std::vector<double> S;
  std::vector<bool> valid;
};

PolarFields polar_decompose(const WavefunctionFrame& frame, const PhysicalUnits& units = {},
                            double node_epsilon = kDefaultNodeEpsilon);

/// Real fields derived from one frame. Entries at masked points are zero.
struct BohmFieldSet {
  std::vector<double> P;
  std::vector<double> p_R;
  std::vector<double> p_I;
  std::vector<double> v_r;
  std::vector<double> V_qu;
  std::vector<double> J;
  std::vector<bool> valid;
};

BohmFieldSet compute_bohm_fields(const WavefunctionFrame& frame, const PhysicalUnits& units = {},
                                 double node_epsilon = kDefaultNodeEpsilon);

/// p_R = hbar Im(psi* psi') / |psi|^2, the real part of (hbar/i) psi'/psi.
std::vector<double> compute_p_R(const WavefunctionFrame& frame, const PhysicalUnits& units = {},
                                double node_epsilon = kDefaultNodeEpsilon);

/// p_I = -hbar Re(psi* psi') / |psi|^2, the imaginary part of (hbar/i) psi'/psi.
std::vector<double> compute_p_I(const WavefunctionFrame& frame, const PhysicalUnits& units = {},
                                double node_epsilon = kDefaultNodeEpsilon);

/// V_qu = -(hbar^2 / 2m) R'' / R with R = |psi| differenced directly.
std::vector<double> compute_quantum_potential(const WavefunctionFrame& frame,
                                              const PhysicalUnits& units = {},
                                              double node_epsilon = kDefaultNodeEpsilon);

struct VelocityAndCurrent {
  std::vector<double> v_r;
  /// J = (hbar/m) Im(psi* psi'), defined everywhere.
  std::vector<double> J;
  std::vector<bool> valid;
};

VelocityAndCurrent compute_velocity_and_current(const WavefunctionFrame& frame,
                                                const PhysicalUnits& units = {},
                                                double node_epsilon = kDefaultNodeEpsilon);

/// The momentum rule (hbar/i) d/dx ln f applied to an arbitrary complex field,
/// evaluated by differencing ln|f| and the unwrapped arg f. Because the
/// difference operator is linear, multiplying f by a function with a real
/// logarithmic derivative shifts only the imaginary part.
struct MomentumRule {
  std::vector<double> real;
  std::vector<double> imag;
  std::vector<bool> valid;
};

MomentumRule apply_momentum_rule(std::span<const cplx> f, double dx,
                                 const PhysicalUnits& units = {},
                                 double node_epsilon = kDefaultNodeEpsilon);

/// Max discrepancies between equivalent evaluations, over valid points.
struct FieldCrossChecks {
  /// |Re{(hbar/i) psi'/psi} - hbar Im(psi* psi')/|psi|^2| / max|p_R|-scale.
  double p_R_forms = 0.0;
  /// |p_I - (-hbar R'/R)| relative to the momentum scale; discretization-limited.
  double p_I_forms = 0.0;
  /// |J - P v_r| / max|J|-scale.
  double current_consistency = 0.0;
  /// |(p_R + i p_I) - (hbar/i) psi'/psi| relative, pointwise.
  double decomposition_closure = 0.0;
};

FieldCrossChecks cross_check_fields(const WavefunctionFrame& frame,
                                    const PhysicalUnits& units = {},
                                    double node_epsilon = kDefaultNodeEpsilon);

/// Quantum potential of a two-particle amplitude on the product grid,
/// row-major with index (i1, i2) -> i1 * n + i2.
struct QuantumPotential2 {
  std::size_t n = 0;
  std::vector<double> values;
  std::vector<bool> valid;

  double at(std::size_t i1, std::size_t i2) const { return values[i1 * n + i2]; }
};

QuantumPotential2 compute_quantum_potential_2particle(std::span<const cplx> psi2,
                                                      const Grid1D& grid,
                                                      const PhysicalUnits& units = {},
                                                      double node_epsilon = kDefaultNodeEpsilon);

/// max |V(i,j) - V(i,j0) - V(i0,j) + V(i0,j0)| over valid points, anchored at the
/// valid point of max amplitude. Zero for V(x1, x2) = f(x1) + g(x2).
double separability_defect(const QuantumPotential2& vq, std::span<const cplx> psi2);

}  // namespace bohmflow
