#include "bohmflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bohmflow/bohm_fields.hpp"
#include "bohmflow/errors.hpp"
#include "bohmflow/numerics/finite_difference.hpp"
#include "bohmflow/numerics/quadrature.hpp"
#include "bohmflow/propagator.hpp"

namespace bohmflow {

namespace {

std::vector<double> amplitude(std::span<const cplx> psi) {
  std::vector<double> r(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) r[i] = std::abs(psi[i]);
  return r;
}

// Shrinks a mask so that every stencil centred on a kept point sees only kept points.
std::vector<bool> erode(const std::vector<bool>& mask) {
  const std::size_t n = mask.size();
  const std::size_t r = numerics::kStencilRadius;
  std::vector<bool> out(mask);
  for (std::size_t i = 0; i < n; ++i) {
    if (mask[i]) continue;
    for (std::size_t j = (i >= r ? i - r : 0); j <= std::min(n - 1, i + r); ++j) out[j] = false;
  }
  return out;
}

std::vector<bool> core_mask(const std::vector<bool>& valid, std::span<const double> R,
                            double core_fraction) {
  const double peak = *std::max_element(R.begin(), R.end());
  std::vector<bool> core(valid.size());
  for (std::size_t i = 0; i < valid.size(); ++i)
    core[i] = valid[i] && R[i] >= core_fraction * peak;
  return core;
}

double masked_mass_of(std::span<const double> P, double dx, const std::vector<bool>& valid) {
  return std::max(0.0, numerics::trapezoid(P, dx) - numerics::trapezoid_masked(P, dx, valid));
}

void require_small_masked_mass(double masked) {
  if (masked > kMaxMaskedMass) {
    std::ostringstream msg;
    msg << "probability in masked regions is " << masked << " (limit " << kMaxMaskedMass
        << "); quadrature over valid points is unreliable";
    throw PreconditionError(msg.str());
  }
}

double energy_floor(const Grid1D& grid, const PhysicalUnits& u) {
  return u.hbar * u.hbar / (u.mass * grid.length() * grid.length());
}

}  // namespace

MomentumExpectations expectation_momentum(const WavefunctionFrame& frame,
                                          const PhysicalUnits& units, double node_epsilon) {
  const BohmFieldSet f = compute_bohm_fields(frame, units, node_epsilon);
  const double dx = frame.grid.dx();
  const std::size_t n = frame.size();
  const auto d1 = numerics::first_derivative(frame.view(), dx);

  std::vector<double> re(n), im(n), pr(n), pi(n), x1(n), x2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx z = std::conj(frame.values[i]) * cplx(0.0, -units.hbar) * d1[i];
    re[i] = z.real();
    im[i] = z.imag();
    pr[i] = f.P[i] * f.p_R[i];
    pi[i] = f.P[i] * f.p_I[i];
    const double x = frame.grid.x(i);
    x1[i] = f.P[i] * x;
    x2[i] = f.P[i] * x * x;
  }
  MomentumExpectations e;
  e.masked_mass = masked_mass_of(f.P, dx, f.valid);
  require_small_masked_mass(e.masked_mass);
  e.p_Q = numerics::trapezoid(re, dx);
  e.p_Q_imag = numerics::trapezoid(im, dx);
  e.p_R = numerics::trapezoid_masked(pr, dx, f.valid);
  e.p_I = numerics::trapezoid_masked(pi, dx, f.valid);
  const double norm = numerics::trapezoid(f.P, dx);
  const double mean = numerics::trapezoid(x1, dx) / norm;
  e.width = std::sqrt(std::max(0.0, numerics::trapezoid(x2, dx) / norm - mean * mean));
  return e;
}

double check_commutator(const WavefunctionFrame& frame, const PhysicalUnits& units,
                        double node_epsilon) {
  const std::size_t n = frame.size();
  const double dx = frame.grid.dx();
  std::vector<cplx> xpsi(n);
  for (std::size_t i = 0; i < n; ++i) xpsi[i] = frame.grid.x(i) * frame.values[i];
  const MomentumRule plain = apply_momentum_rule(frame.view(), dx, units, node_epsilon);
  const MomentumRule shifted = apply_momentum_rule(xpsi, dx, units, node_epsilon);

  double scale = units.hbar / frame.grid.length();
  for (std::size_t i = 0; i < n; ++i)
    if (plain.valid[i]) scale = std::max(scale, std::abs(plain.real[i]));
  double dev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!plain.valid[i] || !shifted.valid[i] || !(std::abs(frame.grid.x(i)) > dx)) continue;
    dev = std::max(dev, std::abs(shifted.real[i] - plain.real[i]));
  }
  return dev / scale;
}

OperatorProductFields operator_product_fields(const WavefunctionFrame& frame,
                                              const PhysicalUnits& units, double node_epsilon,
                                              double core_fraction) {
  const std::size_t n = frame.size();
  const double dx = frame.grid.dx();
  const double hbar = units.hbar;
  const double two_m = 2.0 * units.mass;
  const BohmFieldSet f = compute_bohm_fields(frame, units, node_epsilon);
  const PolarFields polar = polar_decompose(frame, units, node_epsilon);
  const std::vector<double>& R = polar.R;
  const auto dR = numerics::first_derivative(std::span<const double>(R), dx);
  const auto d2R = numerics::second_derivative(std::span<const double>(R), dx);
  const auto d2S = numerics::second_derivative(std::span<const double>(polar.S), dx);

  std::vector<cplx> g1(n), g2(n);
  for (std::size_t i = 0; i < n; ++i) {
    g1[i] = f.p_R[i] * frame.values[i];
    g2[i] = cplx(0.0, f.p_I[i]) * frame.values[i];
  }
  const auto dg1 = numerics::first_derivative(std::span<const cplx>(g1), dx);
  const auto dg2 = numerics::first_derivative(std::span<const cplx>(g2), dx);

  OperatorProductFields out;
  out.core = core_mask(erode(f.valid), R, core_fraction);
  out.kinetic.assign(n, 0.0);
  out.quantum_potential.assign(n, 0.0);
  out.pR_pI.assign(n, 0.0);
  out.pI_pR.assign(n, 0.0);
  std::vector<double> kc(n, 0.0), qc(n, 0.0), ric(n, 0.0), irc(n, 0.0);
  const cplx minus_i_hbar(0.0, -hbar);
  for (std::size_t i = 0; i < n; ++i) {
    if (!f.valid[i]) continue;
    const double sp = f.p_R[i];
    out.kinetic[i] = sp * sp / two_m;
    out.quantum_potential[i] = -(hbar * hbar / two_m) * d2R[i] / R[i];
    out.pR_pI[i] = -(hbar / two_m) * dR[i] * sp / R[i];
    out.pI_pR[i] = out.pR_pI[i] - (hbar / two_m) * d2S[i];
    if (!out.core[i]) continue;
    const cplx q1 = minus_i_hbar * dg1[i] / frame.values[i];
    const cplx q2 = minus_i_hbar * dg2[i] / frame.values[i];
    kc[i] = q1.real() / two_m;
    irc[i] = q1.imag() / two_m;
    qc[i] = q2.real() / two_m;
    ric[i] = q2.imag() / two_m;
  }
  double scale = energy_floor(frame.grid, units);
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.core[i]) continue;
    scale = std::max({scale, std::abs(out.kinetic[i]), std::abs(out.quantum_potential[i]),
                      std::abs(out.pR_pI[i]), std::abs(out.pI_pR[i])});
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.core[i]) continue;
    out.kinetic_error = std::max(out.kinetic_error, std::abs(out.kinetic[i] - kc[i]));
    out.quantum_potential_error =
        std::max(out.quantum_potential_error, std::abs(out.quantum_potential[i] - qc[i]));
    out.pR_pI_error = std::max(out.pR_pI_error, std::abs(out.pR_pI[i] - ric[i]));
    out.pI_pR_error = std::max(out.pI_pR_error, std::abs(out.pI_pR[i] - irc[i]));
  }
  out.kinetic_error /= scale;
  out.quantum_potential_error /= scale;
  out.pR_pI_error /= scale;
  out.pI_pR_error /= scale;
  return out;
}

double FrameTriple::dt() const {
  if (!(prev.grid == mid.grid) || !(mid.grid == next.grid))
    throw InvalidArgument("frame triple must share one grid");
  const double a = mid.time - prev.time;
  const double b = next.time - mid.time;
  if (a == 0.0 || !std::isfinite(a)) throw InvalidArgument("frame triple has zero time spacing");
  if (std::abs(a - b) > 1e-9 * std::abs(a))
    throw InvalidArgument("frame triple is not uniformly spaced in time");
  return 0.5 * (a + b);
}

EnergyRuleFields energy_rule_fields(const FrameTriple& frames, const PhysicalUnits& units,
                                    double node_epsilon) {
  const double dt = frames.dt();
  const std::size_t n = frames.mid.size();
  const double hbar = units.hbar;
  EnergyRuleFields e;
  e.valid = valid_mask(frames.mid.view(), node_epsilon);
  e.e_R.assign(n, 0.0);
  e.e_I.assign(n, 0.0);
  e.e_R_from_phase.assign(n, 0.0);
  e.e_I_from_amplitude.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!e.valid[i]) continue;
    const cplx a = frames.prev.values[i];
    const cplx b = frames.mid.values[i];
    const cplx c = frames.next.values[i];
    const cplx rule = cplx(0.0, hbar) * (c - a) / (2.0 * dt * b);
    e.e_R[i] = rule.real();
    e.e_I[i] = rule.imag();
    e.e_R_from_phase[i] = -hbar * std::arg(c * std::conj(a)) / (2.0 * dt);
    e.e_I_from_amplitude[i] = hbar * (std::abs(c) - std::abs(a)) / (2.0 * dt * std::abs(b));
  }
  return e;
}

ContinuityResult continuity_residual(const FrameTriple& frames, const PhysicalUnits& units,
                                     double node_epsilon, double core_fraction) {
  const double dt = frames.dt();
  const std::size_t n = frames.mid.size();
  const double dx = frames.mid.grid.dx();
  const BohmFieldSet f = compute_bohm_fields(frames.mid, units, node_epsilon);
  const auto dJ = numerics::first_derivative(std::span<const double>(f.J), dx);

  ContinuityResult out;
  out.residual.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dP = (std::norm(frames.next.values[i]) - std::norm(frames.prev.values[i])) /
                      (2.0 * dt);
    out.residual[i] = dP + dJ[i];
    out.max_residual = std::max(out.max_residual, std::abs(out.residual[i]));
  }

  const OperatorProductFields ops =
      operator_product_fields(frames.mid, units, node_epsilon, core_fraction);
  const EnergyRuleFields e = energy_rule_fields(frames, units, node_epsilon);
  out.operator_residual.assign(n, 0.0);
  std::vector<double> weighted(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!ops.core[i]) continue;
    out.operator_residual[i] = e.e_I[i] - (ops.pR_pI[i] + ops.pI_pR[i]);
    weighted[i] = f.P[i] * out.operator_residual[i];
    out.max_operator_residual = std::max(out.max_operator_residual, std::abs(out.operator_residual[i]));
  }
  out.weighted = numerics::trapezoid_masked(weighted, dx, ops.core);
  return out;
}

QhjResult qhj_residual(const FrameTriple& frames, std::span<const double> potential,
                       const PhysicalUnits& units, double node_epsilon, double core_fraction) {
  const std::size_t n = frames.mid.size();
  if (potential.size() != n) throw InvalidArgument("potential length does not match the grid");
  const double dx = frames.mid.grid.dx();
  const BohmFieldSet f = compute_bohm_fields(frames.mid, units, node_epsilon);
  const EnergyRuleFields e = energy_rule_fields(frames, units, node_epsilon);
  const std::vector<double> R = amplitude(frames.mid.view());
  const std::vector<bool> core = core_mask(f.valid, R, core_fraction);

  QhjResult out;
  out.e_R = e.e_R;
  out.residual.assign(n, 0.0);
  std::vector<double> weighted(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    const double classical = f.p_R[i] * f.p_R[i] / (2.0 * units.mass) + potential[i];
    out.residual[i] = e.e_R[i] - (classical + f.V_qu[i]);
    weighted[i] = f.P[i] * out.residual[i];
    out.max_residual = std::max(out.max_residual, std::abs(out.residual[i]));
  }
  out.weighted = numerics::trapezoid_masked(weighted, dx, core);
  return out;
}

double expected_energy(const FrameTriple& frames, const PhysicalUnits& units) {
  const double dt = frames.dt();
  const std::size_t n = frames.mid.size();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx d = frames.next.values[i] - frames.prev.values[i];
    w[i] = (cplx(0.0, units.hbar) * std::conj(frames.mid.values[i]) * d).real() / (2.0 * dt);
  }
  return numerics::trapezoid(w, frames.mid.grid.dx());
}

EnergyPartition energy_partition(const FrameTriple& frames, std::span<const double> potential,
                                 const PhysicalUnits& units, double node_epsilon) {
  const std::size_t n = frames.mid.size();
  if (potential.size() != n) throw InvalidArgument("potential length does not match the grid");
  const double dx = frames.mid.grid.dx();
  const BohmFieldSet f = compute_bohm_fields(frames.mid, units, node_epsilon);

  EnergyPartition p;
  p.masked_mass = masked_mass_of(f.P, dx, f.valid);
  require_small_masked_mass(p.masked_mass);
  std::vector<double> kin(n), pot(n), qu(n);
  for (std::size_t i = 0; i < n; ++i) {
    kin[i] = f.P[i] * f.p_R[i] * f.p_R[i] / (2.0 * units.mass);
    pot[i] = f.P[i] * potential[i];
    qu[i] = f.P[i] * f.V_qu[i];
  }
  p.exp_eR = expected_energy(frames, units);
  p.kinetic_R = numerics::trapezoid_masked(kin, dx, f.valid);
  p.potential_V = numerics::trapezoid(pot, dx);
  p.quantum_pot_term = numerics::trapezoid_masked(qu, dx, f.valid);
  return p;
}

std::array<WavefunctionFrame, 3> centered_triple(const WavefunctionFrame& frame,
                                                 std::span<const double> potential, double dt,
                                                 const PhysicalUnits& units) {
  const std::vector<double> v(potential.begin(), potential.end());
  const CrankNicolson forward(frame.grid, v, dt, units);
  const CrankNicolson backward(frame.grid, v, -dt, units);
  return {backward.step(frame), frame, forward.step(frame)};
}

double EnergyDrift::relative() const {
  const double scale = std::max(std::abs(initial), std::numeric_limits<double>::min());
  return std::abs(final - initial) / scale;
}

EnergyDrift measure_energy_drift(const WavefunctionFrame& initial,
                                 std::span<const double> potential, double dt,
                                 std::size_t n_steps, const PhysicalUnits& units) {
  const std::vector<double> v(potential.begin(), potential.end());
  const CrankNicolson forward(initial.grid, v, dt, units);
  const CrankNicolson backward(initial.grid, v, -dt, units);
  EnergyDrift d;
  {
    const WavefunctionFrame before = backward.step(initial);
    const WavefunctionFrame after = forward.step(initial);
    d.initial = expected_energy({before, initial, after}, units);
  }
  WavefunctionFrame prev = initial;
  WavefunctionFrame cur = initial;
  std::vector<cplx> scratch;
  for (std::size_t s = 0; s < n_steps; ++s) {
    prev = cur;
    forward.step_in_place(cur.values, scratch);
    cur.time = initial.time + dt * static_cast<double>(s + 1);
  }
  if (n_steps == 0) prev = backward.step(initial);
  const WavefunctionFrame next = forward.step(cur);
  d.final = expected_energy({prev, cur, next}, units);
  return d;
}

Tolerances Tolerances::profile(const std::string& name) {
  Tolerances t;
  if (name == "default") return t;
  if (name == "strict") {
    t.expectation /= 100.0;
    t.p_Q_imag /= 100.0;
    t.commutator /= 10.0;
    t.energy_drift /= 100.0;
    return t;
  }
  throw InvalidArgument("unknown tolerance profile '" + name + "' (expected strict or default)");
}

std::vector<IdentityCheck> DiagnosticsReport::checks() const {
  const Tolerances& t = tolerances;
  std::vector<IdentityCheck> out;
  out.push_back({"p_R_equals_p_Q", std::abs(momentum.p_R - momentum.p_Q) / (1.0 + std::abs(momentum.p_Q)),
                 t.expectation});
  out.push_back({"p_Q_imaginary_part", std::abs(momentum.p_Q_imag), t.p_Q_imag});
  out.push_back({"p_I_vanishes", std::abs(momentum.p_I) * momentum.width, t.expectation});
  out.push_back({"commutator", commutator_max, t.commutator});
  for (const auto& c : identity_suite) out.push_back(c);
  const double e_scale = std::max({std::abs(partition.exp_eR),
                                   std::abs(partition.kinetic_R) + std::abs(partition.potential_V) +
                                       std::abs(partition.quantum_pot_term),
                                   std::numeric_limits<double>::min()});
  out.push_back({"energy_partition", std::abs(partition.closure()) / e_scale, t.partition});
  out.push_back({"continuity_weighted", std::abs(continuity_weighted) / e_scale, t.continuity_weighted});
  out.push_back({"qhj_weighted", std::abs(qhj_weighted) / e_scale, t.qhj_weighted});
  if (energy_drift) out.push_back({"energy_drift", energy_drift->relative(), t.energy_drift});
  return out;
}

bool DiagnosticsReport::passed() const {
  for (const auto& c : checks())
    if (!c.passed()) return false;
  return true;
}

DiagnosticsReport diagnose(const FrameTriple& frames, std::span<const double> potential,
                           const PhysicalUnits& units, double node_epsilon,
                           const Tolerances& tolerances) {
  DiagnosticsReport r;
  r.tolerances = tolerances;
  r.time = frames.mid.time;
  r.norm = frames.mid.norm();
  r.momentum = expectation_momentum(frames.mid, units, node_epsilon);
  r.masked_mass = r.momentum.masked_mass;
  r.partition = energy_partition(frames, potential, units, node_epsilon);
  const ContinuityResult cont = continuity_residual(frames, units, node_epsilon);
  r.continuity_residual_max = cont.max_residual;
  r.continuity_operator_residual_max = cont.max_operator_residual;
  r.continuity_weighted = cont.weighted;
  const QhjResult qhj = qhj_residual(frames, potential, units, node_epsilon);
  r.qhj_residual_max = qhj.max_residual;
  r.qhj_weighted = qhj.weighted;
  r.commutator_max = check_commutator(frames.mid, units, node_epsilon);

  const OperatorProductFields ops = operator_product_fields(frames.mid, units, node_epsilon);
  const EnergyRuleFields e = energy_rule_fields(frames, units, node_epsilon);
  const std::vector<double> R = amplitude(frames.mid.view());
  const std::vector<bool> core = core_mask(e.valid, R, kCoreFraction);
  double e_scale = energy_floor(frames.mid.grid, units);
  double err_R = 0.0, err_I = 0.0;
  for (std::size_t i = 0; i < R.size(); ++i) {
    if (!core[i]) continue;
    e_scale = std::max({e_scale, std::abs(e.e_R[i]), std::abs(e.e_I[i])});
    err_R = std::max(err_R, std::abs(e.e_R[i] - e.e_R_from_phase[i]));
    err_I = std::max(err_I, std::abs(e.e_I[i] - e.e_I_from_amplitude[i]));
  }
  const double tol = tolerances.identity;
  r.identity_suite = {
      {"kinetic", ops.kinetic_error, tol},
      {"quantum_potential", ops.quantum_potential_error, tol},
      {"pR_pI", ops.pR_pI_error, tol},
      {"pI_pR", ops.pI_pR_error, tol},
      {"e_R", err_R / e_scale, tol},
      {"e_I", err_I / e_scale, tol},
  };
  return r;
}

}  // namespace bohmflow
