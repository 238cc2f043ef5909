// Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned here.
// Exit status is the number of failed criteria (0 when all pass).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "bohmflow/bohm_fields.hpp"
#include "bohmflow/config.hpp"
#include "bohmflow/diagnostics.hpp"
#include "bohmflow/negf.hpp"
#include "bohmflow/propagator.hpp"
#include "bohmflow/trajectories.hpp"
#include "oracles/free_gaussian.hpp"
#include "oracles/transfer_matrix.hpp"

using namespace bohmflow;

namespace {

namespace tol {
constexpr double kExpectation = 1e-8;    // C1, in units of hbar
constexpr double kCommutator = 1e-10;    // C2
constexpr double kStationaryV = 1e-8;    // C3 max |v_r|
constexpr double kStationaryE = 1e-6;    // C3 relative
constexpr double kStationaryCore = 1e-4; // C3 R / max R
constexpr double kIdentity = 1e-6;       // C4
constexpr double kRatio = 4.0;           // C5
constexpr double kRatioBand = 0.2;       // C5 relative
constexpr double kPartition = 1e-6;      // C6 absolute
constexpr double kDrift = 1e-8;          // C6 relative
constexpr double kTrajectory = 5e-3;     // C7 relative
constexpr double kKsCoefficient = 1.63;  // C8, divided by sqrt(n)
constexpr double kPhaseGradient = 1e-6;  // C11
constexpr double kFisherLee = 1e-8;      // C11 relative
constexpr double kDivergence = 1e-8;     // C11
}  // namespace tol

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string config_path(const char* name) { return std::string(BOHMFLOW_CONFIG_DIR) + "/" + name; }

SimulationConfig gaussian_config(double x_min, double x_max, std::size_t n, initial_states::Gaussian g,
                                 double dt, std::size_t steps, std::size_t stride) {
  SimulationConfig c;
  c.grid = Grid1D(x_min, x_max, n);
  c.initial_state = g;
  c.dt = dt;
  c.n_steps = steps;
  c.frame_stride = stride;
  return c;
}

WavefunctionFrame initial_frame(const SimulationConfig& c) {
  return init_wavefunction(c.initial_state, c.grid, c.units, c.potential);
}

WavefunctionFrame final_frame(const SimulationConfig& c) {
  WavefunctionFrame last = initial_frame(c);
  propagate_streaming(c, [&](const WavefunctionFrame& f) { last = f; });
  return last;
}

// Ordering violations from every trajectory run in the suite, filled by C7-C9.
struct TrajectoryRun {
  std::string name;
  std::size_t violations;
};
std::vector<TrajectoryRun> g_runs;

Outcome c1_expectation() {
  const Grid1D grid(-10.0, 10.0, 2048);
  const auto psi = init_wavefunction(initial_states::Gaussian{0.0, 1.0, 3.0}, grid);
  const auto m = expectation_momentum(psi);
  const double d_rq = std::abs(m.p_R - m.p_Q);
  const double d_i = std::abs(m.p_I);
  return {d_rq < tol::kExpectation && d_i < tol::kExpectation,
          fmt("|<p_R>-<p_Q>| = %.2e, |<p_I>| = %.2e (tol %.0e hbar)", d_rq, d_i, tol::kExpectation)};
}

Outcome c2_commutator() {
  std::vector<std::pair<std::string, WavefunctionFrame>> states;
  for (const char* name : {"free_gaussian.toml", "moving_gaussian.toml", "harmonic_ground.toml", "tunnel.toml"})
    states.emplace_back(name, initial_frame(load_config(config_path(name))));
  SimulationConfig h = load_config(config_path("harmonic_ground.toml"));
  for (unsigned n : {1u, 2u, 3u}) {
    h.initial_state = initial_states::HarmonicEigenstate{n};
    states.emplace_back("harmonic n=" + std::to_string(n), initial_frame(h));
  }
  states.emplace_back("moving gaussian t=0.5", final_frame(load_config(config_path("moving_gaussian.toml"))));
  double worst = 0.0;
  std::string worst_name;
  for (const auto& [name, psi] : states) {
    const double c = check_commutator(psi);
    if (c >= worst) {
      worst = c;
      worst_name = name;
    }
  }
  return {worst < tol::kCommutator, fmt("max deviation %.2e on %zu states, worst %s (tol %.0e)", worst,
                                        states.size(), worst_name.c_str(), tol::kCommutator)};
}

struct StationaryDeviation {
  double v_max = 0.0;
  double e_max = 0.0;
};

StationaryDeviation stationary_deviation(const WavefunctionFrame& psi, std::span<const double> v,
                                         const SimulationConfig& c, double energy) {
  const auto f = compute_bohm_fields(psi, c.units, c.node_epsilon);
  double r_max = 0.0;
  for (double p : f.P) r_max = std::max(r_max, std::sqrt(p));
  StationaryDeviation d;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (!f.valid[i] || std::sqrt(f.P[i]) <= tol::kStationaryCore * r_max) continue;
    d.v_max = std::max(d.v_max, std::abs(f.v_r[i]));
    d.e_max = std::max(d.e_max, std::abs((v[i] + f.V_qu[i]) / energy - 1.0));
  }
  return d;
}

// Gated on the eigenstate itself. The propagated frame is reported only: the
// closed form is not an eigenstate of the three-point Hamiltonian, so its v_r
// grows like t dx^2 under evolution.
Outcome c3_stationary() {
  const SimulationConfig c = load_config(config_path("harmonic_ground.toml"));
  const auto v = evaluate_potential(c.potential, c.grid, c.units);
  const double energy = 0.5 * c.units.hbar * std::get<potentials::Harmonic>(c.potential).omega;
  const auto d0 = stationary_deviation(initial_frame(c), v, c, energy);
  const auto d1 = stationary_deviation(final_frame(c), v, c, energy);
  return {d0.v_max < tol::kStationaryV && d0.e_max < tol::kStationaryE,
          fmt("max|v_r| = %.2e (tol %.0e), max rel |V+V_qu-hw/2| = %.2e (tol %.0e); after %zu steps "
              "(not gated) %.2e, %.2e",
              d0.v_max, tol::kStationaryV, d0.e_max, tol::kStationaryE, c.n_steps, d1.v_max, d1.e_max)};
}

Outcome c4_identities() {
  const auto c = gaussian_config(-10.0, 10.0, 2048, {0.0, 1.0, 0.0}, 1e-4, 5000, 5000);
  const auto v = evaluate_potential(c.potential, c.grid, c.units);
  const auto t = centered_triple(final_frame(c), v, c.dt, c.units);
  const auto r = diagnose({t[0], t[1], t[2]}, v, c.units);
  double worst = 0.0;
  std::ostringstream parts;
  for (const auto& id : r.identity_suite) {
    worst = std::max(worst, id.max_relative_error);
    parts << ' ' << id.name << '=' << fmt("%.1e", id.max_relative_error);
  }
  return {worst < tol::kIdentity,
          fmt("t = %g, max %.2e (tol %.0e);", r.time, worst, tol::kIdentity) + parts.str()};
}

Outcome c5_convergence() {
  std::vector<double> cont, qhj;
  std::size_t n = 1025;
  double dt = 2e-3;
  for (int level = 0; level < 3; ++level) {
    const auto steps = static_cast<std::size_t>(std::lround(0.5 / dt));
    const auto c = gaussian_config(-15.0, 15.0, n, {0.0, 1.0, 1.0}, dt, steps, steps);
    const auto v = evaluate_potential(c.potential, c.grid, c.units);
    const auto t = centered_triple(final_frame(c), v, dt, c.units);
    const FrameTriple ft{t[0], t[1], t[2]};
    cont.push_back(continuity_residual(ft, c.units).max_residual);
    qhj.push_back(qhj_residual(ft, v, c.units).max_residual);
    n = 2 * n - 1;
    dt /= 2.0;
  }
  bool ok = true;
  std::vector<double> ratios;
  for (const auto* r : {&cont, &qhj}) {
    for (int k = 0; k < 2; ++k) {
      const double q = (*r)[k] / (*r)[k + 1];
      ratios.push_back(q);
      ok = ok && std::abs(q / tol::kRatio - 1.0) <= tol::kRatioBand;
    }
  }
  return {ok, fmt("continuity %.2e %.2e %.2e (ratios %.2f %.2f), QHJ %.2e %.2e %.2e (ratios %.2f %.2f), "
                  "band %.0f +- %.0f%%",
                  cont[0], cont[1], cont[2], ratios[0], ratios[1], qhj[0], qhj[1], qhj[2], ratios[2],
                  ratios[3], tol::kRatio, 100.0 * tol::kRatioBand)};
}

Outcome c6_partition() {
  const SimulationConfig c = load_config(config_path("harmonic_ground.toml"));
  const auto v = evaluate_potential(c.potential, c.grid, c.units);
  const auto psi = initial_frame(c);
  const auto t = centered_triple(psi, v, c.dt, c.units);
  const auto p = energy_partition({t[0], t[1], t[2]}, v, c.units, c.node_epsilon);
  const double dev = std::max({std::abs(p.exp_eR - 0.5), std::abs(p.kinetic_R), std::abs(p.potential_V - 0.25),
                               std::abs(p.quantum_pot_term - 0.25)});
  const auto drift = measure_energy_drift(psi, v, c.dt, c.n_steps, c.units);
  return {dev < tol::kPartition && drift.relative() < tol::kDrift,
          fmt("(%.9f, %.1e, %.9f, %.9f), max dev %.2e (tol %.0e); <e_R> drift %.2e over %zu steps (tol %.0e)",
              p.exp_eR, p.kinetic_R, p.potential_V, p.quantum_pot_term, dev, tol::kPartition, drift.relative(),
              c.n_steps, tol::kDrift)};
}

Outcome c7_free_trajectories() {
  const SimulationConfig c = load_config(config_path("free_gaussian.toml"));
  const auto g = std::get<initial_states::Gaussian>(c.initial_state);
  const oracle::FreeGaussian exact{g.x0, g.sigma0, g.k0, c.units.hbar, c.units.mass};
  const double t_end = 2.0 * c.units.mass * g.sigma0 * g.sigma0 / c.units.hbar;
  const auto r = propagate(c);
  const auto x0 = sample_initial_positions(r.frames.front(), 100, c.seed);
  const auto e = integrate_trajectories(r.frames, x0, c.units, c.node_epsilon);
  const std::size_t last = e.times.size() - 1;
  double worst = 0.0;
  for (std::size_t k = 0; k < e.n_traj; ++k) {
    const double expect = x0[k] * exact.sigma(e.times[last]) / g.sigma0;
    worst = std::max(worst, std::abs(e.at(last, k) - expect) / std::abs(expect));
  }
  g_runs.push_back({"free gaussian, 100 trajectories", e.ordering_violations()});
  const bool at_end = std::abs(e.times[last] - t_end) < 1e-9;
  return {at_end && worst < tol::kTrajectory,
          fmt("t = %g, max relative deviation %.2e over %zu trajectories (tol %.1e)", e.times[last], worst,
              e.n_traj, tol::kTrajectory)};
}

Outcome c8_equivariance() {
  const SimulationConfig c = load_config(config_path("free_gaussian.toml"));
  const std::size_t n = 10000;
  const auto r = propagate(c);
  const auto e = integrate_trajectories(r.frames, sample_initial_positions(r.frames.front(), n, c.seed), c.units,
                                        c.node_epsilon);
  const double bound = tol::kKsCoefficient / std::sqrt(static_cast<double>(n));
  const std::size_t m = r.frames.size() - 1;
  bool ok = true;
  std::string parts;
  for (std::size_t t : {m / 3, 2 * m / 3, m}) {
    const double ks = ks_distance(e.positions_at(t), r.frames[t]);
    ok = ok && ks < bound;
    parts += fmt(" t=%g: %.4f", e.times[t], ks);
  }
  g_runs.push_back({"free gaussian, 10000 trajectories", e.ordering_violations()});
  return {ok, fmt("KS (bound %.4f):", bound) + parts};
}

Outcome c9_tunneling() {
  const SimulationConfig c = load_config(config_path("tunnel.toml"));
  const auto out = run_tunneling_experiment(c, c.n_traj);
  const auto& r = out.report;
  g_runs.push_back({"tunnel.toml", r.ordering_violations});
  const double diff = std::abs(r.transmission_fraction - r.wave_transmission);
  return {diff < r.binomial_bound(),
          fmt("T_traj %.4f, T_wave %.6f, |diff| %.4f (bound %.4f), n = %zu, halted %zu, exited %zu",
              r.transmission_fraction, r.wave_transmission, diff, r.binomial_bound(), r.n_trajectories,
              r.n_halted, r.n_exited)};
}

// The remaining bundled runs are streamed; C7-C9 have already registered theirs.
Outcome c10_non_crossing() {
  for (const char* name : {"harmonic_ground.toml", "moving_gaussian.toml"}) {
    const SimulationConfig c = load_config(config_path(name));
    const auto psi0 = initial_frame(c);
    TrajectoryIntegrator integ(sample_initial_positions(psi0, c.n_traj, c.seed), c.units, c.node_epsilon);
    propagate_streaming(c, [&](const WavefunctionFrame& f) { integ.push_frame(f); });
    g_runs.push_back({name, integ.ordering_violations()});
  }
  std::size_t total = 0;
  std::string parts;
  for (const auto& run : g_runs) {
    total += run.violations;
    parts += fmt(" [%s: %zu]", run.name.c_str(), run.violations);
  }
  return {total == 0, fmt("%zu violations over %zu runs:", total, g_runs.size()) + parts};
}

Outcome c11_negf() {
  // Phase gradient on a uniform chain against the inverted dispersion E = -2t cos(ka).
  const double t = 1.0;
  const auto uniform = negf::NegfModel::uniform(80, t);
  double grad_err = 0.0;
  for (double e = -1.9; e <= 1.9; e += 0.1) {
    const auto row = negf::compute_green_row(uniform, 20, e);
    const double ka = std::acos(-e / (2.0 * t));
    for (std::size_t i = 20; i + 1 < uniform.size(); ++i)
      grad_err = std::max(grad_err, std::abs((row.theta[i + 1] - row.theta[i]) - ka));
  }

  const SimulationConfig c = load_config(config_path("negf_barrier.toml"));
  const negf::NegfSweepSpec& spec = *c.negf;
  const auto model = spec.model();
  const auto points = negf::run_sweep(spec, c.units);
  double fl_err = 0.0, div = 0.0;
  for (const auto& p : points) {
    const double expect = oracle::transfer_matrix_transmission(model.site_energies, model.hopping, p.energy,
                                                               model.lead_onsite_left, model.lead_onsite_right);
    fl_err = std::max(fl_err, std::abs(p.transmission - expect) / std::max(expect, 1e-300));
    div = std::max(div, p.current.max_divergence());
  }
  return {grad_err < tol::kPhaseGradient && fl_err < tol::kFisherLee && div < tol::kDivergence,
          fmt("phase gradient %.2e (tol %.0e), Fisher-Lee vs transfer matrix %.2e rel (tol %.0e), "
              "current divergence %.2e (tol %.0e), %zu energies",
              grad_err, tol::kPhaseGradient, fl_err, tol::kFisherLee, div, tol::kDivergence, points.size())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"expectation equivalence", c1_expectation},
      {"commutator", c2_commutator},
      {"stationary state", c3_stationary},
      {"identity suite", c4_identities},
      {"residual convergence", c5_convergence},
      {"energy partition", c6_partition},
      {"free-Gaussian trajectories", c7_free_trajectories},
      {"equivariance", c8_equivariance},
      {"tunneling", c9_tunneling},
      {"non-crossing", c10_non_crossing},
      {"negf", c11_negf},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.passed) ++failed;
    std::printf("%s %2zu %s: %s [%.1fs]\n", o.passed ? "PASS" : "FAIL", k + 1, criteria[k].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed;
}
