#include "bohmflow/propagator.hpp"

#include <cmath>
#include <string>

#include "bohmflow/errors.hpp"

namespace bohmflow {

namespace {

numerics::TridiagonalFactor<cplx> factor_lhs(std::size_t n, std::span<const double> v, double kd,
                                             double ko, cplx a) {
  std::vector<cplx> lower(n, a * ko), diag(n), upper(n, a * ko);
  for (std::size_t i = 0; i < n; ++i) diag[i] = 1.0 + a * (kd + v[i]);
  return numerics::TridiagonalFactor<cplx>(lower, diag, upper);
}

void check_inputs(const Grid1D& grid, std::span<const double> v, double dt,
                  const PhysicalUnits& units) {
  units.validate();
  if (!std::isfinite(dt) || dt == 0.0) throw InvalidArgument("dt must be finite and non-zero");
  if (v.size() != grid.size()) throw InvalidArgument("potential length does not match the grid");
  for (double x : v)
    if (!std::isfinite(x)) throw InvalidArgument("potential has non-finite values");
}

}  // namespace

CrankNicolson::CrankNicolson(const Grid1D& grid, std::vector<double> potential, double dt,
                             const PhysicalUnits& units)
    : grid_(grid),
      potential_((check_inputs(grid, potential, dt, units), std::move(potential))),
      dt_(dt),
      units_(units),
      kinetic_diag_(units.hbar * units.hbar / (units.mass * grid.dx() * grid.dx())),
      kinetic_off_(-0.5 * kinetic_diag_),
      a_(0.0, dt / (2.0 * units.hbar)),
      lhs_(factor_lhs(grid.size(), potential_, kinetic_diag_, kinetic_off_, a_)) {}

std::vector<cplx> CrankNicolson::apply_hamiltonian(std::span<const cplx> psi) const {
  const std::size_t n = psi.size();
  if (n != grid_.size()) throw InvalidArgument("field length does not match the grid");
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx nb = 0.0;
    if (i > 0) nb += psi[i - 1];
    if (i + 1 < n) nb += psi[i + 1];
    out[i] = (kinetic_diag_ + potential_[i]) * psi[i] + kinetic_off_ * nb;
  }
  return out;
}

void CrankNicolson::step_in_place(std::vector<cplx>& psi, std::vector<cplx>& scratch) const {
  const std::size_t n = psi.size();
  if (n != grid_.size()) throw InvalidArgument("field length does not match the grid");
  scratch.resize(n);
  // scratch = (1 - a H) psi
  for (std::size_t i = 0; i < n; ++i) {
    cplx nb = 0.0;
    if (i > 0) nb += psi[i - 1];
    if (i + 1 < n) nb += psi[i + 1];
    scratch[i] = psi[i] - a_ * ((kinetic_diag_ + potential_[i]) * psi[i] + kinetic_off_ * nb);
  }
  lhs_.solve_in_place(scratch);
  psi.swap(scratch);
}

WavefunctionFrame CrankNicolson::step(const WavefunctionFrame& frame) const {
  if (!(frame.grid == grid_)) throw InvalidArgument("frame grid differs from the stepper grid");
  WavefunctionFrame out{frame.grid, frame.time + dt_, frame.values};
  std::vector<cplx> scratch;
  step_in_place(out.values, scratch);
  return out;
}

WavefunctionFrame step_crank_nicolson(const WavefunctionFrame& frame,
                                      std::span<const double> potential, double dt,
                                      const PhysicalUnits& units) {
  CrankNicolson cn(frame.grid, std::vector<double>(potential.begin(), potential.end()), dt, units);
  return cn.step(frame);
}

std::size_t stored_frame_count(std::size_t n_steps, std::size_t frame_stride) {
  if (frame_stride == 0) throw InvalidArgument("frame_stride must be at least 1");
  return 1 + n_steps / frame_stride + (n_steps % frame_stride != 0 ? 1 : 0);
}

PropagationSummary propagate_streaming(const WavefunctionFrame& initial,
                                       std::span<const double> potential, double dt,
                                       std::size_t n_steps, std::size_t frame_stride,
                                       const PhysicalUnits& units, const FrameSink& sink,
                                       PropagationOptions options) {
  if (frame_stride == 0) throw InvalidArgument("frame_stride must be at least 1");
  const CrankNicolson cn(initial.grid, std::vector<double>(potential.begin(), potential.end()), dt,
                         units);
  PropagationSummary summary;
  const double norm0 = initial.norm();
  const bool track_confinement = initial.confined();

  WavefunctionFrame frame = initial;
  std::vector<cplx> scratch;
  auto emit = [&] {
    summary.max_norm_drift = std::max(summary.max_norm_drift, std::abs(frame.norm() - norm0));
    ++summary.n_frames;
    if (sink) sink(frame);
  };
  emit();
  for (std::size_t s = 1; s <= n_steps; ++s) {
    cn.step_in_place(frame.values, scratch);
    frame.time = initial.time + dt * static_cast<double>(s);
    if (track_confinement && !summary.confinement_violation_time && !frame.confined()) {
      summary.confinement_violation_time = frame.time;
      if (options.stop_on_confinement_violation) {
        throw ConfinementError("wave packet reached the grid boundary at t = " +
                                   std::to_string(frame.time) + " (edge/peak amplitude " +
                                   std::to_string(frame.boundary_ratio()) + ")",
                               frame.time);
      }
    }
    if (s % frame_stride == 0 || s == n_steps) emit();
  }
  return summary;
}

PropagationSummary propagate_streaming(const SimulationConfig& config, const FrameSink& sink,
                                       PropagationOptions options) {
  config.validate();
  const WavefunctionFrame initial =
      init_wavefunction(config.initial_state, config.grid, config.units, config.potential);
  const std::vector<double> v = evaluate_potential(config.potential, config.grid, config.units);
  return propagate_streaming(initial, v, config.dt, config.n_steps, config.frame_stride,
                             config.units, sink, options);
}

PropagationResult propagate(const SimulationConfig& config, PropagationOptions options) {
  PropagationResult result;
  result.frames.reserve(stored_frame_count(config.n_steps, config.frame_stride));
  result.summary = propagate_streaming(
      config, [&](const WavefunctionFrame& f) { result.frames.push_back(f); }, options);
  return result;
}

}  // namespace bohmflow
