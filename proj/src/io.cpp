#include "bohmflow/io.hpp"

#include <charconv>
#include <chrono>
#include <ctime>

#include "bohmflow/errors.hpp"

namespace bohmflow::io {

using nlohmann::json;

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Shortest representation that reads back to the same double.
std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::ofstream open_for_writing(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void check_written(std::ostream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::vector<double> doubles(const json& record, const char* key, std::size_t n,
                            const std::filesystem::path& path, std::size_t line) {
  auto it = record.find(key);
  if (it == record.end() || !it->is_array() || it->size() != n) {
    throw IoError(path.string() + ":" + std::to_string(line) + ": field '" + key +
                  "' missing or of wrong length");
  }
  return it->get<std::vector<double>>();
}

}  // namespace

FieldsWriter::FieldsWriter(const std::filesystem::path& path, const json& extra)
    : path_(path), out_(open_for_writing(path)) {
  json header = {{"schema", kFieldsSchema},
                 {"schema_version", kFieldsSchemaVersion},
                 {"created", utc_timestamp()}};
  if (extra.is_object())
    for (auto it = extra.begin(); it != extra.end(); ++it) header[it.key()] = it.value();
  out_ << header.dump() << '\n';
  check_written(out_, path_);
}

void FieldsWriter::write(const WavefunctionFrame& frame, const BohmFieldSet& fields) {
  const std::size_t n = frame.size();
  if (fields.P.size() != n || fields.valid.size() != n)
    throw InvalidArgument("field set length does not match the frame");
  std::vector<double> x(n), re(n), im(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = frame.grid.x(i);
    re[i] = frame.values[i].real();
    im[i] = frame.values[i].imag();
  }
  const json record = {{"t", frame.time},   {"x", x},           {"re_psi", re},
                       {"im_psi", im},      {"P", fields.P},    {"p_R", fields.p_R},
                       {"p_I", fields.p_I}, {"v_r", fields.v_r}, {"V_qu", fields.V_qu},
                       {"J", fields.J},     {"mask", fields.valid}};
  out_ << record.dump() << '\n';
  check_written(out_, path_);
  ++records_;
}

void write_fields_ndjson(const std::filesystem::path& path,
                         std::span<const WavefunctionFrame> frames,
                         std::span<const BohmFieldSet> fields, const json& extra) {
  if (frames.size() != fields.size())
    throw InvalidArgument("frame and field-set counts differ");
  FieldsWriter w(path, extra);
  for (std::size_t k = 0; k < frames.size(); ++k) w.write(frames[k], fields[k]);
}

FieldsFile read_fields_ndjson(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  FieldsFile file;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (line_no == 1) {
      if (j.value("schema", std::string()) != kFieldsSchema ||
          j.value("schema_version", -1) != kFieldsSchemaVersion)
        throw IoError(path.string() + ": not a bohmflow fields file of schema version " +
                      std::to_string(kFieldsSchemaVersion));
      file.header = std::move(j);
      continue;
    }
    FieldRecord r;
    if (!j.contains("t") || !j["t"].is_number() || !j.contains("x") || !j["x"].is_array())
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": record lacks t or x");
    r.t = j["t"].get<double>();
    r.x = j["x"].get<std::vector<double>>();
    const std::size_t n = r.x.size();
    r.re_psi = doubles(j, "re_psi", n, path, line_no);
    r.im_psi = doubles(j, "im_psi", n, path, line_no);
    r.P = doubles(j, "P", n, path, line_no);
    r.p_R = doubles(j, "p_R", n, path, line_no);
    r.p_I = doubles(j, "p_I", n, path, line_no);
    r.v_r = doubles(j, "v_r", n, path, line_no);
    r.V_qu = doubles(j, "V_qu", n, path, line_no);
    r.J = doubles(j, "J", n, path, line_no);
    if (!j.contains("mask") || !j["mask"].is_array() || j["mask"].size() != n)
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": field 'mask' malformed");
    r.mask = j["mask"].get<std::vector<bool>>();
    file.records.push_back(std::move(r));
  }
  if (line_no == 0) throw IoError(path.string() + ": empty file, header missing");
  return file;
}

void write_trajectories_csv(const std::filesystem::path& path, const TrajectoryEnsemble& ensemble) {
  std::ofstream out = open_for_writing(path);
  out << "traj_id,t,x,flag\n";
  for (std::size_t k = 0; k < ensemble.n_traj; ++k) {
    const std::string flag =
        k < ensemble.flags.size() ? flag_name(ensemble.flags[k]) : flag_name(TrajectoryFlag::interior);
    for (std::size_t t = 0; t < ensemble.times.size(); ++t)
      out << k << ',' << num(ensemble.times[t]) << ',' << num(ensemble.at(t, k)) << ',' << flag
          << '\n';
  }
  check_written(out, path);
}

void write_negf_energy_csv(const std::filesystem::path& path, const negf::SweepPoint& p) {
  std::ofstream out = open_for_writing(path);
  out << "site,abs_G,theta,v,J\n";
  const std::size_t n = p.row.magnitude.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double j = i + 1 < n ? p.current.bond[i] : p.current.right_lead;
    out << i << ',' << num(p.row.magnitude[i]) << ',' << num(p.row.theta[i]) << ','
        << num(p.velocity[i]) << ',' << num(j) << '\n';
  }
  check_written(out, path);
}

void write_negf_sweep_csv(const std::filesystem::path& path,
                          std::span<const negf::SweepPoint> points) {
  std::ofstream out = open_for_writing(path);
  out << "energy,transmission,current_left_lead,current_right_lead,max_divergence\n";
  for (const auto& p : points) {
    out << num(p.energy) << ',' << num(p.transmission) << ',' << num(p.current.left_lead) << ','
        << num(p.current.right_lead) << ',' << num(p.current.max_divergence()) << '\n';
  }
  check_written(out, path);
}

json to_json(const DiagnosticsReport& r) {
  json j;
  j["time"] = r.time;
  j["norm"] = r.norm;
  j["masked_mass"] = r.masked_mass;
  j["exp_pQ"] = r.momentum.p_Q;
  j["exp_pQ_imag"] = r.momentum.p_Q_imag;
  j["exp_pR"] = r.momentum.p_R;
  j["exp_pI"] = r.momentum.p_I;
  j["position_width"] = r.momentum.width;
  j["exp_eR"] = r.partition.exp_eR;
  j["kinetic_R"] = r.partition.kinetic_R;
  j["potential_V"] = r.partition.potential_V;
  j["quantum_pot_term"] = r.partition.quantum_pot_term;
  j["partition_closure"] = r.partition.closure();
  j["continuity_residual_max"] = r.continuity_residual_max;
  j["continuity_operator_residual_max"] = r.continuity_operator_residual_max;
  j["continuity_weighted"] = r.continuity_weighted;
  j["qhj_residual_max"] = r.qhj_residual_max;
  j["qhj_weighted"] = r.qhj_weighted;
  j["commutator_max"] = r.commutator_max;
  if (r.energy_drift) {
    j["exp_eR_initial"] = r.energy_drift->initial;
    j["exp_eR_final"] = r.energy_drift->final;
  }
  for (const auto& c : r.identity_suite) j["identity_" + c.name] = c.max_relative_error;
  for (const auto& c : r.checks()) {
    j["check_" + c.name] = c.max_relative_error;
    j["check_" + c.name + "_tol"] = c.tolerance;
  }
  j["passed"] = r.passed();
  return j;
}

json to_json(const TunnelReport& r) {
  json hist = {{"lo", r.dwell_time_distribution.lo},
               {"hi", r.dwell_time_distribution.hi},
               {"counts", r.dwell_time_distribution.counts}};
  return {{"transmission_fraction", r.transmission_fraction},
          {"wave_transmission", r.wave_transmission},
          {"reflection_fraction", r.reflection_fraction},
          {"binomial_bound", r.binomial_bound()},
          {"dwell_time_mean", r.dwell_time_mean},
          {"dwell_time_distribution", hist},
          {"n_trajectories", r.n_trajectories},
          {"n_transmitted", r.n_transmitted},
          {"n_reflected", r.n_reflected},
          {"n_interior", r.n_interior},
          {"n_halted", r.n_halted},
          {"n_exited", r.n_exited},
          {"ordering_violations", r.ordering_violations},
          {"barrier_a", r.barrier_a},
          {"barrier_b", r.barrier_b},
          {"barrier_height", r.barrier_height},
          {"mean_energy", r.mean_energy},
          {"final_time", r.final_time},
          {"norm_drift", r.norm_drift}};
}

void write_json(const std::filesystem::path& path, const json& value) {
  std::ofstream out = open_for_writing(path);
  out << value.dump(2) << '\n';
  check_written(out, path);
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

}  // namespace bohmflow::io
