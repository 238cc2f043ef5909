#include "bohmflow/config.hpp"

#include <fstream>
#include <sstream>

#include "bohmflow/errors.hpp"
#include "bohmflow/toml_lite.hpp"

namespace bohmflow {

namespace {

using toml_lite::Document;

std::size_t get_count(const Document& doc, const std::string& section, const std::string& key,
                      std::optional<std::int64_t> fallback = std::nullopt) {
  const std::int64_t v = doc.get_integer(section, key, fallback);
  if (v < 0) {
    const toml_lite::Value* at = doc.find(section, key);
    throw ConfigError(doc.source(), at ? at->line : doc.section_line(section),
                      "'" + section + "." + key + "' must be non-negative");
  }
  return static_cast<std::size_t>(v);
}

int line_of(const Document& doc, const std::string& section, const std::string& key) {
  const toml_lite::Value* v = doc.find(section, key);
  return v ? v->line : doc.section_line(section);
}

PotentialSpec read_potential(const Document& doc) {
  const std::string s = "potential";
  if (!doc.has_section(s)) return potentials::Free{};
  const std::string type = doc.get_string(s, "type", std::string("free"));
  if (type == "free") return potentials::Free{};
  if (type == "harmonic") return potentials::Harmonic{doc.get_number(s, "omega", 1.0)};
  if (type == "rectangular_barrier") {
    return potentials::RectangularBarrier{doc.get_number(s, "v0"), doc.get_number(s, "a"),
                                          doc.get_number(s, "b")};
  }
  if (type == "tabulated") return potentials::Tabulated{doc.get_number_array(s, "values")};
  throw ConfigError(doc.source(), line_of(doc, s, "type"), "unknown potential type '" + type + "'");
}

InitialStateSpec read_initial_state(const Document& doc) {
  const std::string s = "initial_state";
  if (!doc.has_section(s)) return initial_states::Gaussian{};
  const std::string type = doc.get_string(s, "type", std::string("gaussian"));
  if (type == "gaussian") {
    return initial_states::Gaussian{doc.get_number(s, "x0", 0.0), doc.get_number(s, "sigma0", 1.0),
                                    doc.get_number(s, "k0", 0.0)};
  }
  if (type == "plane_wave") return initial_states::PlaneWave{doc.get_number(s, "k0", 0.0)};
  if (type == "harmonic_eigenstate") {
    return initial_states::HarmonicEigenstate{static_cast<unsigned>(get_count(doc, s, "n", 0))};
  }
  if (type == "tabulated") {
    const std::vector<double> re = doc.get_number_array(s, "re");
    std::vector<double> im(re.size(), 0.0);
    if (doc.find(s, "im") != nullptr) im = doc.get_number_array(s, "im");
    if (im.size() != re.size())
      throw ConfigError(doc.source(), line_of(doc, s, "im"), "'re' and 'im' lengths differ");
    initial_states::Tabulated t;
    t.values.reserve(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) t.values.emplace_back(re[i], im[i]);
    return t;
  }
  throw ConfigError(doc.source(), line_of(doc, s, "type"),
                    "unknown initial_state type '" + type + "'");
}

negf::NegfSweepSpec read_negf(const Document& doc) {
  const std::string s = "negf";
  negf::NegfSweepSpec n;
  n.n_sites = get_count(doc, s, "n_sites", 100);
  n.hopping = doc.get_number(s, "hopping", 1.0);
  n.lattice_constant = doc.get_number(s, "lattice_constant", 1.0);
  if (doc.find(s, "site_energies") != nullptr) {
    n.site_energies = doc.get_number_array(s, "site_energies");
    n.n_sites = n.site_energies->size();
  }
  n.barrier_height = doc.get_number(s, "barrier_height", 0.0);
  n.barrier_first = get_count(doc, s, "barrier_first", 0);
  n.barrier_last = get_count(doc, s, "barrier_last", 0);
  n.lead_onsite_left = doc.get_number(s, "lead_onsite_left", 0.0);
  n.lead_onsite_right = doc.get_number(s, "lead_onsite_right", 0.0);
  n.broadening = doc.get_number(s, "broadening", 0.0);
  n.source_site = get_count(doc, s, "source_site", 0);
  n.e_min = doc.get_number(s, "e_min", -1.0);
  n.e_max = doc.get_number(s, "e_max", 1.0);
  n.n_energies = get_count(doc, s, "n_energies", 11);
  n.injection_rate = doc.get_number(s, "injection_rate", 1.0);
  return n;
}

}  // namespace

void SimulationConfig::validate() const {
  units.validate();
  validate_potential(potential, grid);
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (frame_stride < 1) throw InvalidArgument("frame_stride must be at least 1");
  if (!(node_epsilon > 0.0 && node_epsilon < 1e-3))
    throw InvalidArgument("node_epsilon must lie in (0, 1e-3)");
  if (std::holds_alternative<initial_states::HarmonicEigenstate>(initial_state) &&
      !std::holds_alternative<potentials::Harmonic>(potential))
    throw InvalidArgument("harmonic_eigenstate requires a harmonic potential");
  if (const auto* g = std::get_if<initial_states::Gaussian>(&initial_state); g && !(g->sigma0 > 0.0))
    throw InvalidArgument("sigma0 must be positive");
  if (const auto* t = std::get_if<initial_states::Tabulated>(&initial_state);
      t && t->values.size() != grid.size())
    throw InvalidArgument("tabulated initial state length does not match the grid");
  if (negf) negf->model().validate();
}

SimulationConfig parse_config(std::string_view text, const std::string& source) {
  const Document doc = Document::parse(text, source);
  SimulationConfig c;

  // Each block maps ConfigError/InvalidArgument to a line in the file.
  const double x_min = doc.get_number("grid", "x_min", c.grid.x_min());
  const double x_max = doc.get_number("grid", "x_max", c.grid.x_max());
  const std::size_t n_points = get_count(doc, "grid", "n_points",
                                         static_cast<std::int64_t>(c.grid.size()));
  try {
    c.grid = Grid1D(x_min, x_max, n_points);
  } catch (const InvalidArgument& e) {
    throw ConfigError(source, doc.section_line("grid"), e.what());
  }

  c.units.hbar = doc.get_number("units", "hbar", 1.0);
  c.units.mass = doc.get_number("units", "mass", 1.0);
  c.potential = read_potential(doc);
  c.initial_state = read_initial_state(doc);

  c.dt = doc.get_number("time", "dt", c.dt);
  c.n_steps = get_count(doc, "time", "n_steps", 0);
  c.frame_stride = get_count(doc, "time", "frame_stride", 1);

  c.node_epsilon = doc.get_number("simulation", "node_epsilon", kDefaultNodeEpsilon);
  c.seed = static_cast<std::uint64_t>(get_count(doc, "simulation", "seed", 0));
  c.n_traj = get_count(doc, "trajectories", "n_traj", static_cast<std::int64_t>(c.n_traj));
  if (doc.has_section("negf")) c.negf = read_negf(doc);

  doc.reject_unread();

  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(source, 0, std::string("invalid configuration: ") + e.what());
  }
  return c;
}

SimulationConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open configuration file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

}  // namespace bohmflow
