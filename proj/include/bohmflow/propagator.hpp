#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bohmflow/config.hpp"
#include "bohmflow/grid.hpp"
#include "bohmflow/numerics/tridiagonal.hpp"
#include "bohmflow/wavefunction.hpp"

namespace bohmflow {

/// Crank-Nicolson stepper for i hbar dpsi/dt = H psi with
/// H = -(hbar^2 / 2m) d2/dx2 + V, three-point Laplacian and psi = 0 just
/// outside the grid. The implicit matrix is factored once per (grid, V, dt).
/// A negative dt steps backwards in time.
class CrankNicolson {
 public:
  /// Throws NumericalError if the implicit matrix is singular.
  CrankNicolson(const Grid1D& grid, std::vector<double> potential, double dt,
                const PhysicalUnits& units = {});

  double dt() const noexcept { return dt_; }
  const Grid1D& grid() const noexcept { return grid_; }
  std::span<const double> potential() const noexcept { return potential_; }

  /// Advances psi by one step in place. scratch is resized as needed.
  void step_in_place(std::vector<cplx>& psi, std::vector<cplx>& scratch) const;

  WavefunctionFrame step(const WavefunctionFrame& frame) const;

  /// Applies the discrete Hamiltonian used by the scheme.
  std::vector<cplx> apply_hamiltonian(std::span<const cplx> psi) const;

 private:
  Grid1D grid_;
  std::vector<double> potential_;
  double dt_;
  PhysicalUnits units_;
  double kinetic_diag_;
  double kinetic_off_;
  cplx a_;  // i dt / (2 hbar)
  numerics::TridiagonalFactor<cplx> lhs_;
};

WavefunctionFrame step_crank_nicolson(const WavefunctionFrame& frame,
                                      std::span<const double> potential, double dt,
                                      const PhysicalUnits& units = {});

struct PropagationOptions {
  /// Throw ConfinementError at the first step where a packet that started
  /// confined touches an edge. When false the time is only recorded.
  bool stop_on_confinement_violation = true;
};

struct PropagationSummary {
  std::size_t n_frames = 0;
  /// max over stored frames of |norm - initial norm|.
  double max_norm_drift = 0.0;
  std::optional<double> confinement_violation_time;
};

struct PropagationResult {
  std::vector<WavefunctionFrame> frames;
  PropagationSummary summary;
};

/// Stored frames are at steps 0, stride, 2 stride, ... and always the final step.
using FrameSink = std::function<void(const WavefunctionFrame&)>;

PropagationSummary propagate_streaming(const WavefunctionFrame& initial,
                                       std::span<const double> potential, double dt,
                                       std::size_t n_steps, std::size_t frame_stride,
                                       const PhysicalUnits& units, const FrameSink& sink,
                                       PropagationOptions options = {});

PropagationSummary propagate_streaming(const SimulationConfig& config, const FrameSink& sink,
                                       PropagationOptions options = {});

PropagationResult propagate(const SimulationConfig& config, PropagationOptions options = {});

/// Number of frames propagate() stores.
std::size_t stored_frame_count(std::size_t n_steps, std::size_t frame_stride);

}  // namespace bohmflow
