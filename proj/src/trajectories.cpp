#include "bohmflow/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bohmflow/bohm_fields.hpp"
#include "bohmflow/errors.hpp"
#include "bohmflow/numerics/parallel.hpp"
#include "bohmflow/numerics/quadrature.hpp"

namespace bohmflow {

namespace {

std::vector<std::size_t> sorted_order(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  return order;
}

bool stopped(TrajectoryFlag f) {
  return f == TrajectoryFlag::halted_node || f == TrajectoryFlag::exited_grid;
}

std::size_t count_inversions(std::span<const double> x, std::span<const std::size_t> order,
                             double tie_tolerance) {
  std::size_t n = 0;
  for (std::size_t j = 0; j + 1 < order.size(); ++j)
    if (x[order[j + 1]] - x[order[j]] < -tie_tolerance) ++n;
  return n;
}

}  // namespace

std::string flag_name(TrajectoryFlag flag) {
  switch (flag) {
    case TrajectoryFlag::interior: return "interior";
    case TrajectoryFlag::transmitted: return "transmitted";
    case TrajectoryFlag::reflected: return "reflected";
    case TrajectoryFlag::halted_node: return "halted_node";
    case TrajectoryFlag::exited_grid: return "exited_grid";
  }
  return "unknown";
}

DensityCdf::DensityCdf(const Grid1D& grid, std::vector<double> density)
    : grid_(grid), density_(std::move(density)) {
  if (density_.size() != grid_.size()) throw InvalidArgument("density length does not match the grid");
  for (double p : density_)
    if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("density must be finite and non-negative");
  cumulative_ = numerics::cumulative_trapezoid(density_, grid_.dx());
  if (!(total() > 0.0)) throw InvalidArgument("density has zero total mass");
}

DensityCdf::DensityCdf(const WavefunctionFrame& frame) : DensityCdf(frame.grid, frame.density()) {}

double DensityCdf::operator()(double x) const {
  if (x <= grid_.x_min()) return 0.0;
  if (x >= grid_.x_max()) return 1.0;
  const std::size_t i = grid_.cell_index(x);
  const double s = x - grid_.x(i);
  const double slope = (density_[i + 1] - density_[i]) / grid_.dx();
  const double mass = cumulative_[i] + density_[i] * s + 0.5 * slope * s * s;
  return std::clamp(mass / total(), 0.0, 1.0);
}

double DensityCdf::inverse(double u) const {
  const double target = std::clamp(u, 0.0, 1.0) * total();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) return grid_.x_max();
  std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
  i = i == 0 ? 0 : i - 1;
  const double r = target - cumulative_[i];
  const double p0 = density_[i];
  const double slope = (density_[i + 1] - density_[i]) / grid_.dx();
  // Root of p0 s + slope s^2 / 2 = r in the form that stays accurate for slope -> 0.
  const double disc = std::max(0.0, p0 * p0 + 2.0 * slope * r);
  const double denom = p0 + std::sqrt(disc);
  const double s = denom > 0.0 ? 2.0 * r / denom : 0.0;
  return std::min(grid_.x(i) + std::clamp(s, 0.0, grid_.dx()), grid_.x_max());
}

std::vector<double> sample_initial_positions(const WavefunctionFrame& frame0, std::size_t n,
                                             std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("number of trajectories must be positive");
  const DensityCdf cdf(frame0);
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  constexpr double kUnit = 0x1.0p-53;
  for (auto& x : out) x = cdf.inverse(static_cast<double>(rng() >> 11) * kUnit);
  return out;
}

double ks_distance(std::span<const double> points, const WavefunctionFrame& frame) {
  if (points.empty()) throw InvalidArgument("no points for the KS distance");
  std::vector<double> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end());
  const DensityCdf cdf(frame);
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

std::size_t TrajectoryEnsemble::ordering_violations(double tie_tolerance) const {
  if (times.empty() || n_traj < 2) return 0;
  std::vector<std::size_t> order = sorted_order(positions_at(0));
  if (flags.size() == n_traj)
    std::erase_if(order, [&](std::size_t k) { return stopped(flags[k]); });
  std::size_t violations = 0;
  for (std::size_t t = 0; t < times.size(); ++t)
    violations += count_inversions(positions_at(t), order, tie_tolerance);
  return violations;
}

TrajectoryIntegrator::TrajectoryIntegrator(std::vector<double> initial, const PhysicalUnits& units,
                                           double node_epsilon,
                                           std::optional<Interval> dwell_interval)
    : x_(std::move(initial)),
      flags_(x_.size(), TrajectoryFlag::interior),
      dwell_(x_.size(), 0.0),
      units_(units),
      node_epsilon_(node_epsilon),
      dwell_interval_(dwell_interval) {
  units_.validate();
  if (dwell_interval_ && !(dwell_interval_->a < dwell_interval_->b))
    throw InvalidArgument("dwell interval needs a < b");
}

TrajectoryIntegrator::Field TrajectoryIntegrator::make_field(const WavefunctionFrame& frame) const {
  VelocityAndCurrent f = compute_velocity_and_current(frame, units_, node_epsilon_);
  const std::size_t n = f.v_r.size();
  Field out{frame.grid.x_min(), frame.grid.dx(), std::move(f.v_r), {}};
  out.usable.assign(n - 3, 0);
  for (std::size_t j = 0; j + 3 < n; ++j)
    out.usable[j] = f.valid[j] && f.valid[j + 1] && f.valid[j + 2] && f.valid[j + 3];
  return out;
}

TrajectoryIntegrator::Field TrajectoryIntegrator::midpoint(const Field& a, const Field& b) {
  Field m{a.x_min, a.dx, std::vector<double>(a.v.size()), std::vector<unsigned char>(a.usable.size())};
  for (std::size_t i = 0; i < a.v.size(); ++i) m.v[i] = 0.5 * (a.v[i] + b.v[i]);
  for (std::size_t j = 0; j < a.usable.size(); ++j) m.usable[j] = a.usable[j] && b.usable[j];
  return m;
}

std::optional<double> TrajectoryIntegrator::sample(const Field& f, double x) {
  const std::size_t n = f.v.size();
  const double u = (x - f.x_min) / f.dx;
  const auto cell = static_cast<std::ptrdiff_t>(std::floor(u));
  const std::size_t j = static_cast<std::size_t>(
      std::clamp<std::ptrdiff_t>(cell - 1, 0, static_cast<std::ptrdiff_t>(n) - 4));
  if (!f.usable[j]) return std::nullopt;
  const double s = u - static_cast<double>(j);
  const double w0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
  const double w1 = s * (s - 2.0) * (s - 3.0) / 2.0;
  const double w2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
  const double w3 = s * (s - 1.0) * (s - 2.0) / 6.0;
  return w0 * f.v[j] + w1 * f.v[j + 1] + w2 * f.v[j + 2] + w3 * f.v[j + 3];
}

void TrajectoryIntegrator::push_frame(const WavefunctionFrame& frame) {
  Field current = make_field(frame);
  if (!previous_) {
    x_lo_ = frame.grid.x_min();
    x_hi_ = frame.grid.x_max();
    for (double x : x_)
      if (!(x >= x_lo_ && x <= x_hi_)) throw InvalidArgument("initial position outside the grid");
    previous_ = std::move(current);
    time_ = frame.time;
    frames_seen_ = 1;
    initial_order_ = sorted_order(x_);
    return;
  }
  const double h = frame.time - time_;
  if (!(h != 0.0) || !std::isfinite(h)) throw InvalidArgument("frames must advance in time");
  if (current.v.size() != previous_->v.size() || current.x_min != previous_->x_min ||
      current.dx != previous_->dx)
    throw InvalidArgument("all frames must share one grid");

  const Field& f0 = *previous_;
  const Field& f1 = current;
  const Field fm = midpoint(f0, f1);
  numerics::parallel_for(x_.size(), [&](std::size_t k) {
    if (flags_[k] != TrajectoryFlag::interior) return;
    const double x = x_[k];
    auto inside = [&](double y) { return y >= x_lo_ && y <= x_hi_; };
    auto exit_at = [&](double y) {
      x_[k] = std::clamp(y, x_lo_, x_hi_);
      flags_[k] = TrajectoryFlag::exited_grid;
    };
    const auto k1 = sample(f0, x);
    if (!k1) { flags_[k] = TrajectoryFlag::halted_node; return; }
    const double y2 = x + 0.5 * h * *k1;
    if (!inside(y2)) return exit_at(y2);
    const auto k2 = sample(fm, y2);
    if (!k2) { flags_[k] = TrajectoryFlag::halted_node; return; }
    const double y3 = x + 0.5 * h * *k2;
    if (!inside(y3)) return exit_at(y3);
    const auto k3 = sample(fm, y3);
    if (!k3) { flags_[k] = TrajectoryFlag::halted_node; return; }
    const double y4 = x + h * *k3;
    if (!inside(y4)) return exit_at(y4);
    const auto k4 = sample(f1, y4);
    if (!k4) { flags_[k] = TrajectoryFlag::halted_node; return; }
    const double next = x + h / 6.0 * (*k1 + 2.0 * *k2 + 2.0 * *k3 + *k4);
    if (dwell_interval_) {
      // Straight-line motion within the step; the overlap of [x, next] with [a, b].
      const double lo = std::min(x, next);
      const double hi = std::max(x, next);
      const double a = dwell_interval_->a;
      const double b = dwell_interval_->b;
      if (hi == lo) {
        if (lo >= a && lo <= b) dwell_[k] += std::abs(h);
      } else {
        const double overlap = std::max(0.0, std::min(hi, b) - std::max(lo, a));
        dwell_[k] += std::abs(h) * overlap / (hi - lo);
      }
    }
    if (!inside(next)) return exit_at(next);
    x_[k] = next;
  });
  previous_ = std::move(current);
  time_ = frame.time;
  ++frames_seen_;
  std::erase_if(initial_order_, [&](std::size_t k) { return stopped(flags_[k]); });
  ordering_violations_ += count_inversions(x_, initial_order_, kOrderingTieTolerance);
}

TrajectoryEnsemble integrate_trajectories(std::span<const WavefunctionFrame> frames,
                                          std::span<const double> initial,
                                          const PhysicalUnits& units, double node_epsilon) {
  if (frames.size() < 2) throw InvalidArgument("trajectory integration needs at least two frames");
  TrajectoryIntegrator integ(std::vector<double>(initial.begin(), initial.end()), units,
                             node_epsilon);
  TrajectoryEnsemble e;
  e.n_traj = initial.size();
  e.times.reserve(frames.size());
  e.positions.reserve(frames.size() * e.n_traj);
  for (const auto& frame : frames) {
    integ.push_frame(frame);
    e.times.push_back(frame.time);
    const auto x = integ.positions();
    e.positions.insert(e.positions.end(), x.begin(), x.end());
  }
  e.flags = integ.flags();
  e.weights.assign(e.n_traj, e.n_traj ? 1.0 / static_cast<double>(e.n_traj) : 0.0);
  return e;
}

std::size_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

Histogram make_histogram(std::span<const double> values, std::size_t bins) {
  if (bins == 0) throw InvalidArgument("histogram needs at least one bin");
  Histogram h;
  h.counts.assign(bins, 0);
  if (values.empty()) return h;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  h.lo = *lo;
  h.hi = *hi > *lo ? *hi : *lo + 1.0;
  const double width = (h.hi - h.lo) / static_cast<double>(bins);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - h.lo) / width);
    ++h.counts[std::min(b, bins - 1)];
  }
  return h;
}

}  // namespace bohmflow
