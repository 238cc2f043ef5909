#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bohmflow/config.hpp"
#include "bohmflow/wavefunction.hpp"

namespace bohmflow {

/// Probability outside the valid mask above which masked quadrature is refused.
inline constexpr double kMaxMaskedMass = 1e-6;

/// Pointwise residual maxima are taken where R >= kCoreFraction * max R: the
/// ratio forms divide by R and only amplify roundoff further out.
inline constexpr double kCoreFraction = 1e-3;

struct MomentumExpectations {
  double p_Q = 0.0;
  /// Imaginary part of the plain operator expectation; zero up to roundoff.
  double p_Q_imag = 0.0;
  double p_R = 0.0;
  double p_I = 0.0;
  double masked_mass = 0.0;
  /// Standard deviation of x under |psi|^2, the natural unit for p_I is hbar / width.
  double width = 0.0;
};

/// Throws PreconditionError when the masked probability exceeds kMaxMaskedMass.
MomentumExpectations expectation_momentum(const WavefunctionFrame& frame,
                                          const PhysicalUnits& units = {},
                                          double node_epsilon = kDefaultNodeEpsilon);

/// Applies the p_R rule to x psi and to psi and returns
/// max |p_R[x psi] - p_R[psi]| / max(max|p_R[psi]|, hbar / L) over points valid
/// for both fields with |x| > dx.
double check_commutator(const WavefunctionFrame& frame, const PhysicalUnits& units = {},
                        double node_epsilon = kDefaultNodeEpsilon);

/// The four operator products, each divided by 2m and written in terms of R and S:
///   kinetic            p_R p_R / 2m =  S'^2 / 2m
///   quantum_potential -p_I p_I / 2m = -(hbar^2 / 2m) R'' / R
///   pR_pI              p_R p_I / 2m = -(hbar / 2m) R' S' / R
///   pI_pR              p_I p_R / 2m = -(hbar / 2m) R' S' / R - (hbar / 2m) S''
/// The *_error members compare each with the same product built by applying
/// -i hbar d/dx to p_R psi and i p_I psi, relative to the largest product magnitude.
struct OperatorProductFields {
  std::vector<double> kinetic;
  std::vector<double> quantum_potential;
  std::vector<double> pR_pI;
  std::vector<double> pI_pR;
  /// Points where both paths are defined and R is above the core fraction.
  std::vector<bool> core;
  double kinetic_error = 0.0;
  double quantum_potential_error = 0.0;
  double pR_pI_error = 0.0;
  double pI_pR_error = 0.0;
};

OperatorProductFields operator_product_fields(const WavefunctionFrame& frame,
                                              const PhysicalUnits& units = {},
                                              double node_epsilon = kDefaultNodeEpsilon,
                                              double core_fraction = kCoreFraction);

/// Three frames psi_{n-1}, psi_n, psi_{n+1} at uniform spacing.
struct FrameTriple {
  const WavefunctionFrame& prev;
  const WavefunctionFrame& mid;
  const WavefunctionFrame& next;

  /// Throws InvalidArgument unless the grids agree and the spacing is uniform and non-zero.
  double dt() const;
};

/// The two energy rules from centred time differences. The ratio forms use
/// iħ (psi_{n+1} - psi_{n-1}) / (2 dt psi_n); the second forms use the phase
/// increment arg(psi_{n+1} psi_{n-1}^*) and the amplitude increment, so
/// neither unwraps S in time.
struct EnergyRuleFields {
  std::vector<double> e_R;
  std::vector<double> e_I;
  std::vector<double> e_R_from_phase;
  std::vector<double> e_I_from_amplitude;
  std::vector<bool> valid;
};

EnergyRuleFields energy_rule_fields(const FrameTriple& frames, const PhysicalUnits& units = {},
                                    double node_epsilon = kDefaultNodeEpsilon);

struct ContinuityResult {
  /// dP/dt + d/dx (P v_r), every point.
  std::vector<double> residual;
  double max_residual = 0.0;
  /// e_I - (p_R p_I + p_I p_R) / 2m over the core.
  std::vector<double> operator_residual;
  double max_operator_residual = 0.0;
  /// integral of |psi|^2 times the operator residual.
  double weighted = 0.0;
};

ContinuityResult continuity_residual(const FrameTriple& frames, const PhysicalUnits& units = {},
                                     double node_epsilon = kDefaultNodeEpsilon,
                                     double core_fraction = kCoreFraction);

struct QhjResult {
  std::vector<double> e_R;
  /// e_R - (S'^2 / 2m + V + V_qu) over the core, zero elsewhere.
  std::vector<double> residual;
  double max_residual = 0.0;
  double weighted = 0.0;
};

QhjResult qhj_residual(const FrameTriple& frames, std::span<const double> potential,
                       const PhysicalUnits& units = {},
                       double node_epsilon = kDefaultNodeEpsilon,
                       double core_fraction = kCoreFraction);

struct EnergyPartition {
  double exp_eR = 0.0;
  double kinetic_R = 0.0;
  double potential_V = 0.0;
  double quantum_pot_term = 0.0;
  double masked_mass = 0.0;

  double closure() const { return exp_eR - (kinetic_R + potential_V + quantum_pot_term); }
};

/// Throws PreconditionError when the masked probability exceeds kMaxMaskedMass.
EnergyPartition energy_partition(const FrameTriple& frames, std::span<const double> potential,
                                 const PhysicalUnits& units = {},
                                 double node_epsilon = kDefaultNodeEpsilon);

/// <e_R> needs only the triple; this form avoids the node mask entirely.
double expected_energy(const FrameTriple& frames, const PhysicalUnits& units = {});

/// Builds {U(-dt) psi, psi, U(dt) psi} with the propagator's own scheme.
std::array<WavefunctionFrame, 3> centered_triple(const WavefunctionFrame& frame,
                                                 std::span<const double> potential, double dt,
                                                 const PhysicalUnits& units = {});

struct EnergyDrift {
  double initial = 0.0;
  double final = 0.0;
  double relative() const;
};

/// <e_R> at step 0 and at step n_steps of a Crank-Nicolson run.
EnergyDrift measure_energy_drift(const WavefunctionFrame& initial,
                                 std::span<const double> potential, double dt,
                                 std::size_t n_steps, const PhysicalUnits& units = {});

/// Tolerances used by the report and by `verify`.
struct Tolerances {
  double expectation = 1e-8;
  double p_Q_imag = 1e-10;
  double commutator = 1e-10;
  double identity = 1e-6;
  double partition = 1e-6;
  double energy_drift = 1e-8;
  double continuity_weighted = 1e-6;
  double qhj_weighted = 1e-6;

  /// "default" follows the documented tolerances; "strict" tightens the checks
  /// that sit at roundoff level: expectations and energy drift by 100, the
  /// commutator by 10 (its roundoff grows like 1/dx).
  static Tolerances profile(const std::string& name);
};

struct IdentityCheck {
  std::string name;
  double max_relative_error = 0.0;
  double tolerance = 0.0;
  bool passed() const { return max_relative_error < tolerance; }
};

struct DiagnosticsReport {
  double time = 0.0;
  double norm = 0.0;
  double masked_mass = 0.0;
  MomentumExpectations momentum;
  EnergyPartition partition;
  double continuity_residual_max = 0.0;
  double continuity_operator_residual_max = 0.0;
  double continuity_weighted = 0.0;
  double qhj_residual_max = 0.0;
  double qhj_weighted = 0.0;
  double commutator_max = 0.0;
  std::vector<IdentityCheck> identity_suite;
  std::optional<EnergyDrift> energy_drift;
  Tolerances tolerances;

  /// Every checked quantity paired with its tolerance, in report order.
  std::vector<IdentityCheck> checks() const;
  bool passed() const;
};

DiagnosticsReport diagnose(const FrameTriple& frames, std::span<const double> potential,
                           const PhysicalUnits& units = {},
                           double node_epsilon = kDefaultNodeEpsilon,
                           const Tolerances& tolerances = {});

}  // namespace bohmflow
