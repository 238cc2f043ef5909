#include "bohmflow/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <iomanip>
#include <ostream>

#include "CLI11.hpp"
#include "bohmflow/bohm_fields.hpp"
#include "bohmflow/config.hpp"
#include "bohmflow/diagnostics.hpp"
#include "bohmflow/errors.hpp"
#include "bohmflow/io.hpp"
#include "bohmflow/negf.hpp"
#include "bohmflow/propagator.hpp"
#include "bohmflow/trajectories.hpp"

namespace bohmflow::cli {

namespace {

using nlohmann::json;

json describe(const SimulationConfig& c) {
  return {{"grid", {{"x_min", c.grid.x_min()}, {"x_max", c.grid.x_max()}, {"n_points", c.grid.size()}}},
          {"units", {{"hbar", c.units.hbar}, {"mass", c.units.mass}}},
          {"potential", potential_name(c.potential)},
          {"initial_state", initial_state_name(c.initial_state)},
          {"dt", c.dt},
          {"n_steps", c.n_steps},
          {"frame_stride", c.frame_stride},
          {"node_epsilon", c.node_epsilon},
          {"seed", c.seed}};
}

struct Run {
  SimulationConfig config;
  WavefunctionFrame initial;
  std::vector<double> potential;
};

Run prepare(const Options& o) {
  SimulationConfig c = load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.n_traj) c.n_traj = *o.n_traj;
  WavefunctionFrame initial = init_wavefunction(c.initial_state, c.grid, c.units, c.potential);
  std::vector<double> v = evaluate_potential(c.potential, c.grid, c.units);
  return {std::move(c), std::move(initial), std::move(v)};
}

WavefunctionFrame final_frame(const Run& r) {
  WavefunctionFrame last = r.initial;
  propagate_streaming(r.initial, r.potential, r.config.dt, r.config.n_steps, r.config.n_steps == 0 ? 1 : r.config.n_steps,
                      r.config.units, [&](const WavefunctionFrame& f) { last = f; });
  return last;
}

DiagnosticsReport build_report(const Run& r, const Tolerances& tol) {
  const WavefunctionFrame mid = final_frame(r);
  const auto triple = centered_triple(mid, r.potential, r.config.dt, r.config.units);
  DiagnosticsReport rep = diagnose({triple[0], triple[1], triple[2]}, r.potential, r.config.units,
                                   r.config.node_epsilon, tol);
  if (r.config.n_steps > 0)
    rep.energy_drift = measure_energy_drift(r.initial, r.potential, r.config.dt, r.config.n_steps,
                                            r.config.units);
  return rep;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const Run r = prepare(o);
  io::ensure_directory(o.out_dir);
  io::FieldsWriter writer(o.out_dir / "fields.ndjson", describe(r.config));
  const PropagationSummary s = propagate_streaming(
      r.initial, r.potential, r.config.dt, r.config.n_steps, r.config.frame_stride, r.config.units,
      [&](const WavefunctionFrame& f) {
        writer.write(f, compute_bohm_fields(f, r.config.units, r.config.node_epsilon));
      });
  io::write_json(o.out_dir / "simulation.json",
                 {{"config", describe(r.config)},
                  {"n_frames", s.n_frames},
                  {"max_norm_drift", s.max_norm_drift},
                  {"final_time", r.config.final_time()}});
  out << "simulate: " << s.n_frames << " frames, max norm drift " << s.max_norm_drift << " -> "
      << (o.out_dir / "fields.ndjson").string() << '\n';
  return kOk;
}

void print_checks(const DiagnosticsReport& rep, std::ostream& out) {
  for (const auto& c : rep.checks()) {
    out << (c.passed() ? "ok   " : "FAIL ") << std::left << std::setw(24) << c.name << std::right
        << std::scientific << std::setprecision(3) << c.max_relative_error << "  (tol "
        << c.tolerance << ")\n";
  }
  out << std::defaultfloat;
}

int cmd_diagnose(const Options& o, std::ostream& out, bool verify) {
  const Tolerances tol = Tolerances::profile(o.tolerance_profile);
  const Run r = prepare(o);
  io::ensure_directory(o.out_dir);
  const DiagnosticsReport rep = build_report(r, tol);
  json j = io::to_json(rep);
  j["tolerance_profile"] = o.tolerance_profile;
  io::write_json(o.out_dir / (verify ? "verify.json" : "diagnostics.json"), j);
  if (!verify) {
    out << "diagnose: report at t = " << rep.time << " -> "
        << (o.out_dir / "diagnostics.json").string() << '\n';
    return kOk;
  }
  print_checks(rep, out);
  const bool ok = rep.passed();
  out << "verify: " << (ok ? "all identities within tolerance" : "tolerance exceeded") << '\n';
  return ok ? kOk : kToleranceFailure;
}

int cmd_trajectories(const Options& o, std::ostream& out) {
  const Run r = prepare(o);
  io::ensure_directory(o.out_dir);
  if (r.config.n_steps == 0) throw InvalidArgument("trajectories need n_steps > 0");
  TrajectoryIntegrator integ(sample_initial_positions(r.initial, r.config.n_traj, r.config.seed),
                             r.config.units, r.config.node_epsilon);
  TrajectoryEnsemble e;
  e.n_traj = r.config.n_traj;
  std::optional<WavefunctionFrame> last;
  propagate_streaming(r.initial, r.potential, r.config.dt, r.config.n_steps, r.config.frame_stride,
                      r.config.units, [&](const WavefunctionFrame& f) {
                        integ.push_frame(f);
                        e.times.push_back(f.time);
                        const auto x = integ.positions();
                        e.positions.insert(e.positions.end(), x.begin(), x.end());
                        last = f;
                      });
  e.flags = integ.flags();
  e.weights.assign(e.n_traj, 1.0 / static_cast<double>(e.n_traj));
  io::write_trajectories_csv(o.out_dir / "trajectories.csv", e);
  const std::size_t violations = integ.ordering_violations();
  const auto halted = std::count(e.flags.begin(), e.flags.end(), TrajectoryFlag::halted_node);
  const auto exited = std::count(e.flags.begin(), e.flags.end(), TrajectoryFlag::exited_grid);
  const double ks = ks_distance(integ.positions(), *last);
  io::write_json(o.out_dir / "trajectories.json", {{"n_traj", e.n_traj},
                                                   {"n_times", e.times.size()},
                                                   {"ordering_violations", violations},
                                                   {"n_halted", halted},
                                                   {"n_exited", exited},
                                                   {"ks_distance_final", ks},
                                                   {"seed", r.config.seed}});
  out << "trajectories: " << e.n_traj << " worldlines over " << e.times.size()
      << " stored times, ordering violations " << violations << ", final KS " << ks << '\n';
  return kOk;
}

int cmd_tunnel(const Options& o, std::ostream& out) {
  SimulationConfig c = load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.n_traj) c.n_traj = *o.n_traj;
  io::ensure_directory(o.out_dir);
  TunnelOptions opt;
  const std::size_t frames = stored_frame_count(c.n_steps, c.frame_stride);
  opt.record_every = std::max<std::size_t>(1, frames / 200);
  const TunnelOutcome res = run_tunneling_experiment(c, c.n_traj, opt);
  io::write_json(o.out_dir / "tunnel_report.json", io::to_json(res.report));
  io::write_trajectories_csv(o.out_dir / "tunnel_trajectories.csv", res.ensemble);
  out << "tunnel: trajectory transmission " << res.report.transmission_fraction
      << ", wave transmission " << res.report.wave_transmission << " (bound "
      << res.report.binomial_bound() << "), mean dwell " << res.report.dwell_time_mean
      << ", ordering violations " << res.report.ordering_violations << '\n';
  return kOk;
}

int cmd_negf(const Options& o, std::ostream& out) {
  const SimulationConfig c = load_config(o.config);
  if (!c.negf) throw ConfigError(o.config.string(), 0, "the negf subcommand needs a [negf] section");
  io::ensure_directory(o.out_dir / "negf");
  const std::vector<negf::SweepPoint> points = negf::run_sweep(*c.negf, c.units);
  io::write_negf_sweep_csv(o.out_dir / "negf_sweep.csv", points);
  for (std::size_t k = 0; k < points.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "energy_%04zu.csv", k);
    io::write_negf_energy_csv(o.out_dir / "negf" / name, points[k]);
  }
  out << "negf: " << points.size() << " energies -> " << (o.out_dir / "negf_sweep.csv").string()
      << '\n';
  return kOk;
}

}  // namespace

int run(const Options& o, std::ostream& out, std::ostream& err) {
  try {
    if (o.subcommand == "simulate") return cmd_simulate(o, out);
    if (o.subcommand == "diagnose") return cmd_diagnose(o, out, false);
    if (o.subcommand == "verify") return cmd_diagnose(o, out, true);
    if (o.subcommand == "trajectories") return cmd_trajectories(o, out);
    if (o.subcommand == "tunnel") return cmd_tunnel(o, out);
    if (o.subcommand == "negf") return cmd_negf(o, out);
    err << "error: unknown subcommand '" << o.subcommand << "'\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidArgument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const IoError& e) {
    err << "i/o failure: " << e.what() << '\n';
    return kIoFailure;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wave-packet propagation, Bohmian fields, identity checks and trajectories"};
  app.require_subcommand(1);
  Options o;
  std::string seed_text;
  std::size_t n_traj = 0;
  const char* names[][2] = {
      {"simulate", "propagate and write per-frame fields (NDJSON)"},
      {"diagnose", "write the diagnostics report (JSON)"},
      {"trajectories", "integrate a trajectory ensemble (CSV)"},
      {"tunnel", "barrier tunneling experiment (JSON + CSV)"},
      {"negf", "retarded Green's function energy sweep (CSV)"},
      {"verify", "run the identity suite; exit 4 if a tolerance is exceeded"},
  };
  for (const auto& [name, help] : names) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config, "configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out_dir, "output directory");
    sub->add_option("--seed", seed_text, "random seed (unsigned 64-bit)");
    sub->add_option("--n-traj", n_traj, "number of trajectories")->check(CLI::PositiveNumber);
    sub->add_option("--tolerance-profile", o.tolerance_profile, "strict or default")
        ->check(CLI::IsMember({"strict", "default"}));
    sub->callback([&o, sub] { o.subcommand = sub->get_name(); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }
  if (!seed_text.empty()) {
    std::uint64_t s = 0;
    const auto [ptr, ec] = std::from_chars(seed_text.data(), seed_text.data() + seed_text.size(), s);
    if (ec != std::errc() || ptr != seed_text.data() + seed_text.size()) {
      err << "error: --seed must be an unsigned 64-bit integer\n";
      return kConfigError;
    }
    o.seed = s;
  }
  if (n_traj > 0) o.n_traj = n_traj;
  return run(o, out, err);
}

}  // namespace bohmflow::cli
