#include <cmath>
#include <sstream>

#include "bohmflow/errors.hpp"
#include "bohmflow/numerics/quadrature.hpp"
#include "bohmflow/propagator.hpp"
#include "bohmflow/trajectories.hpp"

namespace bohmflow {

namespace {

// Trapezoid mass of |psi|^2 on x > cut, with the partial cell integrated linearly.
double mass_right_of(const WavefunctionFrame& frame, double cut) {
  const std::vector<double> p = frame.density();
  const DensityCdf cdf(frame.grid, p);
  return (1.0 - cdf(cut)) * cdf.total();
}

double mean_energy(const WavefunctionFrame& frame, std::span<const double> v,
                   const PhysicalUnits& units, double dt) {
  const CrankNicolson cn(frame.grid, std::vector<double>(v.begin(), v.end()), dt, units);
  const std::vector<cplx> h = cn.apply_hamiltonian(frame.view());
  std::vector<double> w(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) w[i] = (std::conj(frame.values[i]) * h[i]).real();
  return numerics::trapezoid(w, frame.grid.dx()) / frame.norm();
}

}  // namespace

double TunnelReport::binomial_bound() const {
  if (n_trajectories == 0) return 0.0;
  const double t = wave_transmission;
  return 3.0 * std::sqrt(std::max(0.0, t * (1.0 - t)) / static_cast<double>(n_trajectories));
}

TunnelOutcome run_tunneling_experiment(const SimulationConfig& config, std::size_t n_traj,
                                       const TunnelOptions& options) {
  config.validate();
  const auto* barrier = std::get_if<potentials::RectangularBarrier>(&config.potential);
  if (barrier == nullptr)
    throw PreconditionError("tunneling needs a rectangular_barrier potential, got " +
                            potential_name(config.potential));
  if (config.n_steps == 0) throw PreconditionError("tunneling needs n_steps > 0");

  const WavefunctionFrame initial =
      init_wavefunction(config.initial_state, config.grid, config.units, config.potential);
  const double right_mass = mass_right_of(initial, barrier->a);
  if (right_mass > 1e-6) {
    std::ostringstream msg;
    msg << "initial packet has probability " << right_mass
        << " right of the barrier edge a = " << barrier->a << " (must be below 1e-6)";
    throw PreconditionError(msg.str());
  }
  const std::vector<double> v = evaluate_potential(config.potential, config.grid, config.units);

  TunnelOutcome out;
  TunnelReport& r = out.report;
  r.barrier_a = barrier->a;
  r.barrier_b = barrier->b;
  r.barrier_height = barrier->v0;
  r.n_trajectories = n_traj;
  r.mean_energy = mean_energy(initial, v, config.units, config.dt);

  TrajectoryIntegrator integ(sample_initial_positions(initial, n_traj, config.seed), config.units,
                             config.node_epsilon,
                             TrajectoryIntegrator::Interval{barrier->a, barrier->b});
  TrajectoryEnsemble& e = out.ensemble;
  e.n_traj = n_traj;
  std::optional<WavefunctionFrame> last;
  std::size_t frame_index = 0;
  const std::size_t total_frames = stored_frame_count(config.n_steps, config.frame_stride);
  const PropagationSummary summary = propagate_streaming(
      initial, v, config.dt, config.n_steps, config.frame_stride, config.units,
      [&](const WavefunctionFrame& frame) {
        integ.push_frame(frame);
        const bool final_frame = frame_index + 1 == total_frames;
        if (options.record_every > 0 && (frame_index % options.record_every == 0 || final_frame)) {
          e.times.push_back(frame.time);
          const auto x = integ.positions();
          e.positions.insert(e.positions.end(), x.begin(), x.end());
        }
        if (final_frame) last = frame;
        ++frame_index;
      });
  r.norm_drift = summary.max_norm_drift;
  r.final_time = last->time;
  r.wave_transmission = mass_right_of(*last, barrier->b);
  r.ordering_violations = integ.ordering_violations();

  const auto x = integ.positions();
  std::vector<double> dwell;
  e.flags = integ.flags();
  for (std::size_t k = 0; k < n_traj; ++k) {
    if (e.flags[k] == TrajectoryFlag::halted_node) ++r.n_halted;
    if (e.flags[k] == TrajectoryFlag::exited_grid) ++r.n_exited;
    // Classification is by final position; halted and exited flags stay visible.
    if (x[k] > barrier->b) {
      ++r.n_transmitted;
      dwell.push_back(integ.dwell_times()[k]);
      if (e.flags[k] == TrajectoryFlag::interior) e.flags[k] = TrajectoryFlag::transmitted;
    } else if (x[k] < barrier->a) {
      ++r.n_reflected;
      if (e.flags[k] == TrajectoryFlag::interior) e.flags[k] = TrajectoryFlag::reflected;
    } else {
      ++r.n_interior;
    }
  }
  e.weights.assign(n_traj, 1.0 / static_cast<double>(n_traj));
  r.transmission_fraction = static_cast<double>(r.n_transmitted) / static_cast<double>(n_traj);
  r.reflection_fraction = static_cast<double>(r.n_reflected) / static_cast<double>(n_traj);
  double sum = 0.0;
  for (double d : dwell) sum += d;
  r.dwell_time_mean = dwell.empty() ? 0.0 : sum / static_cast<double>(dwell.size());
  r.dwell_time_distribution = make_histogram(dwell, options.histogram_bins);
  return out;
}

}  // namespace bohmflow
