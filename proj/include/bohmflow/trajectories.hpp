#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bohmflow/config.hpp"
#include "bohmflow/wavefunction.hpp"

namespace bohmflow {

enum class TrajectoryFlag { interior, transmitted, reflected, halted_node, exited_grid };

std::string flag_name(TrajectoryFlag flag);

/// Cumulative distribution of a density sampled on a grid and linearly
/// interpolated between samples, so the CDF is piecewise quadratic.
class DensityCdf {
 public:
  DensityCdf(const Grid1D& grid, std::vector<double> density);
  explicit DensityCdf(const WavefunctionFrame& frame);

  double total() const noexcept { return cumulative_.back(); }
  /// Normalized CDF in [0, 1]; 0 left of the grid, 1 right of it.
  double operator()(double x) const;
  /// Exact inverse of operator() for u in [0, 1).
  double inverse(double u) const;

 private:
  Grid1D grid_;
  std::vector<double> density_;
  std::vector<double> cumulative_;
};

/// Inverse-CDF sampling from |psi|^2 with a seeded 64-bit Mersenne twister.
/// Throws InvalidArgument for n = 0.
std::vector<double> sample_initial_positions(const WavefunctionFrame& frame0, std::size_t n,
                                             std::uint64_t seed);

/// Kolmogorov-Smirnov distance between the empirical distribution of the
/// points and |psi|^2 of the frame.
double ks_distance(std::span<const double> points, const WavefunctionFrame& frame);

inline constexpr double kOrderingTieTolerance = 1e-12;

struct TrajectoryEnsemble {
  std::vector<double> times;
  std::size_t n_traj = 0;
  /// positions[t * n_traj + k] is trajectory k at times[t].
  std::vector<double> positions;
  std::vector<TrajectoryFlag> flags;
  /// Uniform under equilibrium sampling.
  std::vector<double> weights;

  double at(std::size_t t, std::size_t k) const { return positions[t * n_traj + k]; }
  std::span<const double> positions_at(std::size_t t) const {
    return std::span<const double>(positions).subspan(t * n_traj, n_traj);
  }

  /// Pairs adjacent in the initial ordering whose order flips at a stored
  /// time, counted once per time, with differences up to tie_tolerance counted
  /// as ties. Halted and exited trajectories are frozen, so they are skipped and
  /// their live neighbours are compared directly.
  std::size_t ordering_violations(double tie_tolerance = kOrderingTieTolerance) const;
};

/// Advances an ensemble along v_r frame by frame without keeping old frames.
/// Each push after the first makes one RK4 step of length equal to the frame
/// spacing, with linear interpolation in time and 4-point cubic interpolation
/// in space. A trajectory whose stencil touches a masked point is halted;
/// one that leaves the grid is clamped to the edge and stopped.
class TrajectoryIntegrator {
 public:
  struct Interval {
    double a;
    double b;
  };

  TrajectoryIntegrator(std::vector<double> initial, const PhysicalUnits& units = {},
                       double node_epsilon = kDefaultNodeEpsilon,
                       std::optional<Interval> dwell_interval = std::nullopt);

  void push_frame(const WavefunctionFrame& frame);

  std::span<const double> positions() const noexcept { return x_; }
  const std::vector<TrajectoryFlag>& flags() const noexcept { return flags_; }
  /// Time spent inside the dwell interval, zero without one.
  const std::vector<double>& dwell_times() const noexcept { return dwell_; }
  std::size_t frames_seen() const noexcept { return frames_seen_; }
  double time() const noexcept { return time_; }
  /// Same count as TrajectoryEnsemble::ordering_violations, taken after every pushed frame.
  std::size_t ordering_violations() const noexcept { return ordering_violations_; }

 private:
  struct Field {
    double x_min = 0.0;
    double dx = 1.0;
    std::vector<double> v;
    /// usable[j] is set when the 4-point stencil starting at j is all valid.
    std::vector<unsigned char> usable;
  };

  Field make_field(const WavefunctionFrame& frame) const;
  /// Average of two fields, usable where both are.
  static Field midpoint(const Field& a, const Field& b);
  /// Cubic interpolation; nullopt when a stencil point is masked.
  static std::optional<double> sample(const Field& f, double x);

  std::vector<double> x_;
  std::vector<TrajectoryFlag> flags_;
  std::vector<double> dwell_;
  PhysicalUnits units_;
  double node_epsilon_;
  std::optional<Interval> dwell_interval_;
  std::optional<Field> previous_;
  double time_ = 0.0;
  double x_lo_ = 0.0;
  double x_hi_ = 0.0;
  std::size_t frames_seen_ = 0;
  std::vector<std::size_t> initial_order_;
  std::size_t ordering_violations_ = 0;
};

/// Batch form: needs at least two frames and positions inside the grid.
TrajectoryEnsemble integrate_trajectories(std::span<const WavefunctionFrame> frames,
                                          std::span<const double> initial,
                                          const PhysicalUnits& units = {},
                                          double node_epsilon = kDefaultNodeEpsilon);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;

  std::size_t total() const;
};

Histogram make_histogram(std::span<const double> values, std::size_t bins);

struct TunnelReport {
  double transmission_fraction = 0.0;
  double wave_transmission = 0.0;
  double reflection_fraction = 0.0;
  double dwell_time_mean = 0.0;
  Histogram dwell_time_distribution;
  std::size_t n_trajectories = 0;
  std::size_t n_transmitted = 0;
  std::size_t n_reflected = 0;
  std::size_t n_interior = 0;
  std::size_t n_halted = 0;
  std::size_t n_exited = 0;
  /// Over every frame of the run, live trajectories only.
  std::size_t ordering_violations = 0;
  double barrier_a = 0.0;
  double barrier_b = 0.0;
  double barrier_height = 0.0;
  /// <H> of the initial packet.
  double mean_energy = 0.0;
  double final_time = 0.0;
  double norm_drift = 0.0;
  /// 3 sqrt(T (1 - T) / n) with T = wave_transmission.
  double binomial_bound() const;
};

struct TunnelOptions {
  std::size_t histogram_bins = 40;
  /// Keep every record_every-th stored frame in the returned ensemble; 0 keeps none.
  std::size_t record_every = 0;
};

struct TunnelOutcome {
  TunnelReport report;
  TrajectoryEnsemble ensemble;
};

/// Requires a rectangular barrier and an initial packet with less than 1e-6 of
/// its probability right of the barrier's left edge (PreconditionError otherwise).
/// Confinement violations during the run raise ConfinementError.
TunnelOutcome run_tunneling_experiment(const SimulationConfig& config, std::size_t n_traj,
                                       const TunnelOptions& options = {});

}  // namespace bohmflow
