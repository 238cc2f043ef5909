#include "bohmflow/bohm_fields.hpp"

#include <algorithm>
#include <cmath>

#include "bohmflow/errors.hpp"
#include "bohmflow/numerics/finite_difference.hpp"
#include "bohmflow/numerics/unwrap.hpp"

namespace bohmflow {

namespace {

void check_epsilon(double node_epsilon) {
  if (!(node_epsilon > 0.0 && node_epsilon < 1e-3))
    throw InvalidArgument("node_epsilon must lie in (0, 1e-3)");
}

std::vector<bool> dilate(const std::vector<bool>& nodes) {
  const std::size_t n = nodes.size();
  const std::size_t r = numerics::kStencilRadius;
  std::vector<bool> valid(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    if (!nodes[i]) continue;
    const std::size_t lo = i >= r ? i - r : 0;
    const std::size_t hi = std::min(n - 1, i + r);
    for (std::size_t j = lo; j <= hi; ++j) valid[j] = false;
  }
  return valid;
}

std::vector<double> amplitude(std::span<const cplx> psi) {
  std::vector<double> r(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) r[i] = std::abs(psi[i]);
  return r;
}

double max_abs(std::span<const double> v, const std::vector<bool>& mask) {
  double m = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (mask[i]) m = std::max(m, std::abs(v[i]));
  return m;
}

// Momentum scale used to turn absolute discrepancies into relative ones:
// the larger of the field magnitude and hbar / L, so a vanishing field is not
// compared against zero.
double momentum_scale(std::span<const double> a, std::span<const double> b,
                      const std::vector<bool>& mask, double hbar, double length) {
  return std::max({max_abs(a, mask), max_abs(b, mask), hbar / length});
}

}  // namespace

std::vector<bool> node_points(std::span<const cplx> psi, double node_epsilon) {
  check_epsilon(node_epsilon);
  const std::size_t n = psi.size();
  double peak2 = 0.0;
  for (const auto& v : psi) peak2 = std::max(peak2, std::norm(v));
  const double floor2 = node_epsilon * node_epsilon * peak2;
  std::vector<bool> node(n, false);
  for (std::size_t i = 0; i < n; ++i) node[i] = !(std::norm(psi[i]) > floor2);
  // |arg(z)| > pi/2 exactly when Re z < 0.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (node[i] || node[i + 1]) continue;
    if ((psi[i + 1] * std::conj(psi[i])).real() < 0.0) {
      node[i] = true;
      node[i + 1] = true;
    }
  }
  return node;
}

std::vector<bool> valid_mask(std::span<const cplx> psi, double node_epsilon) {
  return dilate(node_points(psi, node_epsilon));
}

PolarFields polar_decompose(const WavefunctionFrame& frame, const PhysicalUnits& units,
                            double node_epsilon) {
  PolarFields out;
  out.R = amplitude(frame.values);
  // Only node points are skipped: a valid point's stencil may reach masked
  // non-node neighbours, whose phase must still be unwrapped correctly.
  const std::vector<bool> nodes = node_points(frame.values, node_epsilon);
  out.valid = dilate(nodes);
  const std::size_t n = frame.size();
  std::vector<double> wrapped(n);
  for (std::size_t i = 0; i < n; ++i) wrapped[i] = std::arg(frame.values[i]);
  std::vector<double> theta = numerics::unwrap_phase(wrapped, nodes);
  const std::size_t anchor =
      static_cast<std::size_t>(std::max_element(out.R.begin(), out.R.end()) - out.R.begin());
  const double ref = theta[anchor];
  out.S.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.S[i] = units.hbar * (theta[i] - ref);
  return out;
}

BohmFieldSet compute_bohm_fields(const WavefunctionFrame& frame, const PhysicalUnits& units,
                                 double node_epsilon) {
  units.validate();
  const std::size_t n = frame.size();
  const double dx = frame.grid.dx();
  const auto d1 = numerics::first_derivative(frame.view(), dx);
  const std::vector<double> R = amplitude(frame.values);
  const auto r2 = numerics::second_derivative(std::span<const double>(R), dx);

  BohmFieldSet f;
  f.valid = valid_mask(frame.values, node_epsilon);
  f.P.resize(n);
  f.p_R.assign(n, 0.0);
  f.p_I.assign(n, 0.0);
  f.v_r.assign(n, 0.0);
  f.V_qu.assign(n, 0.0);
  f.J.resize(n);
  const double hbar = units.hbar;
  const double m = units.mass;
  for (std::size_t i = 0; i < n; ++i) {
    const cplx z = std::conj(frame.values[i]) * d1[i];
    f.P[i] = std::norm(frame.values[i]);
    f.J[i] = hbar / m * z.imag();
    if (!f.valid[i]) continue;
    f.p_R[i] = hbar * z.imag() / f.P[i];
    f.p_I[i] = -hbar * z.real() / f.P[i];
    f.v_r[i] = f.J[i] / f.P[i];
    f.V_qu[i] = -(hbar * hbar / (2.0 * m)) * r2[i] / R[i];
  }
  return f;
}

std::vector<double> compute_p_R(const WavefunctionFrame& frame, const PhysicalUnits& units,
                                double node_epsilon) {
  return compute_bohm_fields(frame, units, node_epsilon).p_R;
}

std::vector<double> compute_p_I(const WavefunctionFrame& frame, const PhysicalUnits& units,
                                double node_epsilon) {
  return compute_bohm_fields(frame, units, node_epsilon).p_I;
}

std::vector<double> compute_quantum_potential(const WavefunctionFrame& frame,
                                              const PhysicalUnits& units, double node_epsilon) {
  return compute_bohm_fields(frame, units, node_epsilon).V_qu;
}

VelocityAndCurrent compute_velocity_and_current(const WavefunctionFrame& frame,
                                                const PhysicalUnits& units, double node_epsilon) {
  units.validate();
  const std::size_t n = frame.size();
  const auto d1 = numerics::first_derivative(frame.view(), frame.grid.dx());
  VelocityAndCurrent out;
  out.valid = valid_mask(frame.values, node_epsilon);
  out.v_r.assign(n, 0.0);
  out.J.resize(n);
  const double c = units.hbar / units.mass;
  for (std::size_t i = 0; i < n; ++i) {
    const double j = c * (std::conj(frame.values[i]) * d1[i]).imag();
    out.J[i] = j;
    if (out.valid[i]) out.v_r[i] = j / std::norm(frame.values[i]);
  }
  return out;
}

MomentumRule apply_momentum_rule(std::span<const cplx> f, double dx, const PhysicalUnits& units,
                                 double node_epsilon) {
  units.validate();
  const std::size_t n = f.size();
  MomentumRule out;
  const std::vector<bool> nodes = node_points(f, node_epsilon);
  out.valid = dilate(nodes);
  std::vector<double> log_r(n, 0.0), wrapped(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Node points only feed stencils of masked points; keep them finite.
    log_r[i] = nodes[i] ? 0.0 : std::log(std::abs(f[i]));
    wrapped[i] = std::arg(f[i]);
  }
  const std::vector<double> theta = numerics::unwrap_phase(wrapped, nodes);
  const auto dlog = numerics::first_derivative(std::span<const double>(log_r), dx);
  const auto dtheta = numerics::first_derivative(std::span<const double>(theta), dx);
  out.real.assign(n, 0.0);
  out.imag.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.valid[i]) continue;
    out.real[i] = units.hbar * dtheta[i];
    out.imag[i] = -units.hbar * dlog[i];
  }
  return out;
}

FieldCrossChecks cross_check_fields(const WavefunctionFrame& frame, const PhysicalUnits& units,
                                    double node_epsilon) {
  const BohmFieldSet f = compute_bohm_fields(frame, units, node_epsilon);
  const std::size_t n = frame.size();
  const double dx = frame.grid.dx();
  const double hbar = units.hbar;
  const auto d1 = numerics::first_derivative(frame.view(), dx);
  const std::vector<double> R = amplitude(frame.values);
  const auto dR = numerics::first_derivative(std::span<const double>(R), dx);
  const double p_scale = momentum_scale(f.p_R, f.p_I, f.valid, hbar, frame.grid.length());
  const double j_scale = std::max(max_abs(f.J, f.valid), hbar / (units.mass * frame.grid.length()) *
                                                             *std::max_element(f.P.begin(), f.P.end()));

  FieldCrossChecks c;
  for (std::size_t i = 0; i < n; ++i) {
    if (!f.valid[i]) continue;
    const cplx rule = cplx(0.0, -hbar) * d1[i] / frame.values[i];
    c.p_R_forms = std::max(c.p_R_forms, std::abs(rule.real() - f.p_R[i]) / p_scale);
    c.p_I_forms = std::max(c.p_I_forms, std::abs(f.p_I[i] + hbar * dR[i] / R[i]) / p_scale);
    c.current_consistency =
        std::max(c.current_consistency, std::abs(f.J[i] - f.P[i] * f.v_r[i]) / j_scale);
    const double mag = std::max(std::abs(rule), p_scale);
    c.decomposition_closure =
        std::max(c.decomposition_closure, std::abs(cplx(f.p_R[i], f.p_I[i]) - rule) / mag);
  }
  return c;
}

QuantumPotential2 compute_quantum_potential_2particle(std::span<const cplx> psi2,
                                                      const Grid1D& grid,
                                                      const PhysicalUnits& units,
                                                      double node_epsilon) {
  units.validate();
  check_epsilon(node_epsilon);
  const std::size_t n = grid.size();
  if (psi2.size() != n * n) throw InvalidArgument("two-particle field must have n x n entries");
  const double dx = grid.dx();
  const std::vector<double> R = amplitude(psi2);
  const double peak = *std::max_element(R.begin(), R.end());
  const auto d2a = numerics::second_derivative_2d(R, n, 0, dx);
  const auto d2b = numerics::second_derivative_2d(R, n, 1, dx);

  std::vector<bool> node(n * n);
  for (std::size_t k = 0; k < n * n; ++k) node[k] = !(R[k] > node_epsilon * peak);

  // Both stencils run along the axes, so a cross-shaped neighbourhood suffices.
  QuantumPotential2 out;
  out.n = n;
  out.values.assign(n * n, 0.0);
  out.valid.assign(n * n, true);
  const std::size_t r = numerics::kStencilRadius;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!node[i * n + j]) continue;
      for (std::size_t k = (i >= r ? i - r : 0); k <= std::min(n - 1, i + r); ++k)
        out.valid[k * n + j] = false;
      for (std::size_t k = (j >= r ? j - r : 0); k <= std::min(n - 1, j + r); ++k)
        out.valid[i * n + k] = false;
    }
  }
  const double c = -(units.hbar * units.hbar) / (2.0 * units.mass);
  for (std::size_t k = 0; k < n * n; ++k)
    if (out.valid[k]) out.values[k] = c * (d2a[k] + d2b[k]) / R[k];
  return out;
}

double separability_defect(const QuantumPotential2& vq, std::span<const cplx> psi2) {
  const std::size_t n = vq.n;
  if (psi2.size() != n * n) throw InvalidArgument("two-particle field must have n x n entries");
  std::size_t anchor = n * n;
  double best = -1.0;
  for (std::size_t k = 0; k < n * n; ++k) {
    if (vq.valid[k] && std::abs(psi2[k]) > best) {
      best = std::abs(psi2[k]);
      anchor = k;
    }
  }
  if (anchor == n * n) throw NumericalError("two-particle field has no valid points");
  const std::size_t i0 = anchor / n;
  const std::size_t j0 = anchor % n;
  double defect = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!vq.valid[i * n + j0]) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (!vq.valid[i * n + j] || !vq.valid[i0 * n + j]) continue;
      defect = std::max(defect, std::abs(vq.at(i, j) - vq.at(i, j0) - vq.at(i0, j) + vq.at(i0, j0)));
    }
  }
  return defect;
}

}  // namespace bohmflow
