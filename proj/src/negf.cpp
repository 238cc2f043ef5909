#include "bohmflow/negf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bohmflow/errors.hpp"
#include "bohmflow/numerics/parallel.hpp"
#include "bohmflow/numerics/tridiagonal.hpp"
#include "bohmflow/numerics/unwrap.hpp"

namespace bohmflow::negf {

void NegfModel::validate() const {
  if (size() < 2) throw InvalidArgument("tight-binding chain needs at least two sites");
  if (!(hopping != 0.0) || !std::isfinite(hopping)) throw InvalidArgument("hopping must be non-zero");
  if (!(broadening >= 0.0)) throw InvalidArgument("broadening must be non-negative");
  if (!(lattice_constant > 0.0)) throw InvalidArgument("lattice constant must be positive");
  for (double e : site_energies)
    if (!std::isfinite(e)) throw InvalidArgument("site energies must be finite");
}

NegfModel NegfModel::uniform(std::size_t n_sites, double hopping, double onsite) {
  NegfModel m;
  m.site_energies.assign(n_sites, onsite);
  m.hopping = hopping;
  m.lead_onsite_left = onsite;
  m.lead_onsite_right = onsite;
  return m;
}

NegfModel NegfModel::with_barrier(std::size_t n_sites, double hopping, double height,
                                  std::size_t first, std::size_t last) {
  if (first > last || last >= n_sites) throw InvalidArgument("barrier sites outside the chain");
  NegfModel m = uniform(n_sites, hopping);
  for (std::size_t i = first; i <= last; ++i) m.site_energies[i] = height;
  return m;
}

cplx lead_self_energy(double energy, double lead_onsite, double hopping, double broadening) {
  const double t = std::abs(hopping);
  const cplx z(energy - lead_onsite, broadening);
  // The product of the two square roots picks the decaying / outgoing branch
  // on both sides of the band and inside it.
  const cplx g = (z - std::sqrt(z - 2.0 * t) * std::sqrt(z + 2.0 * t)) / (2.0 * t * t);
  return t * t * g;
}

double lead_wavenumber(double energy, double lead_onsite, double hopping, double lattice_constant) {
  const double c = -(energy - lead_onsite) / (2.0 * hopping);
  if (!(std::abs(c) < 1.0)) throw InvalidArgument("energy lies outside the lead band");
  return std::acos(c) / lattice_constant;
}

GreensRow compute_green_row(const NegfModel& model, std::size_t source_site, double energy) {
  model.validate();
  const std::size_t n = model.size();
  if (source_site >= n) throw InvalidArgument("source site outside the chain");
  const cplx sl =
      lead_self_energy(energy, model.lead_onsite_left, model.hopping, model.broadening);
  const cplx sr =
      lead_self_energy(energy, model.lead_onsite_right, model.hopping, model.broadening);
  const cplx z(energy, model.broadening);
  std::vector<cplx> lower(n, model.hopping), diag(n), upper(n, model.hopping);
  for (std::size_t i = 0; i < n; ++i) diag[i] = z - model.site_energies[i];
  diag[0] -= sl;
  diag[n - 1] -= sr;

  GreensRow row;
  row.source_site = source_site;
  row.energy = energy;
  row.values.assign(n, 0.0);
  row.values[source_site] = 1.0;
  try {
    numerics::TridiagonalFactor<cplx>(lower, diag, upper).solve_in_place(row.values);
  } catch (const NumericalError& e) {
    std::ostringstream msg;
    msg << "Green's function is singular at E = " << energy
        << " (band edge without broadening?): " << e.what();
    throw NumericalError(msg.str());
  }
  for (const auto& v : row.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NumericalError("Green's function is not finite at this energy");

  row.magnitude.resize(n);
  for (std::size_t i = 0; i < n; ++i) row.magnitude[i] = std::abs(row.values[i]);
  const double peak = *std::max_element(row.magnitude.begin(), row.magnitude.end());
  row.valid.resize(n);
  for (std::size_t i = 0; i < n; ++i) row.valid[i] = row.magnitude[i] > kGreenMaskFraction * peak;

  // Unwrap outwards from the source so theta(source) keeps its principal value.
  std::vector<double> right, left;
  std::vector<bool> skip_right, skip_left;
  for (std::size_t i = source_site; i < n; ++i) {
    right.push_back(std::arg(row.values[i]));
    skip_right.push_back(!row.valid[i]);
  }
  for (std::size_t i = source_site + 1; i-- > 0;) {
    left.push_back(std::arg(row.values[i]));
    skip_left.push_back(!row.valid[i]);
  }
  const auto ur = numerics::unwrap_phase(right, skip_right);
  const auto ul = numerics::unwrap_phase(left, skip_left);
  row.theta.resize(n);
  for (std::size_t k = 0; k < ur.size(); ++k) row.theta[source_site + k] = ur[k];
  for (std::size_t k = 0; k < ul.size(); ++k) row.theta[source_site - k] = ul[k];
  return row;
}

std::pair<double, double> lead_broadenings(const NegfModel& model, double energy) {
  const cplx sl = lead_self_energy(energy, model.lead_onsite_left, model.hopping, model.broadening);
  const cplx sr = lead_self_energy(energy, model.lead_onsite_right, model.hopping, model.broadening);
  return {-2.0 * sl.imag(), -2.0 * sr.imag()};
}

double transmission(const NegfModel& model, double energy) {
  const GreensRow row = compute_green_row(model, model.size() - 1, energy);
  const auto [gl, gr] = lead_broadenings(model, energy);
  return gl * gr * std::norm(row.values[0]);
}

double effective_mass(const NegfModel& model, const PhysicalUnits& units) {
  return units.hbar * units.hbar /
         (2.0 * model.hopping * model.lattice_constant * model.lattice_constant);
}

std::vector<double> phase_velocity(const GreensRow& row, const NegfModel& model,
                                   const PhysicalUnits& units) {
  const std::size_t n = row.theta.size();
  if (n < 2) throw InvalidArgument("row too short for a phase gradient");
  const double a = model.lattice_constant;
  const double c = units.hbar / effective_mass(model, units);
  std::vector<double> v(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!row.valid[i]) continue;
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
    if (!row.valid[lo] || !row.valid[hi]) continue;
    v[i] = c * (row.theta[hi] - row.theta[lo]) / (static_cast<double>(hi - lo) * a);
  }
  return v;
}

double CoherentCurrent::max_divergence() const {
  const double ref = std::max(std::abs(left_lead), std::abs(right_lead));
  if (ref == 0.0) {
    double m = 0.0;
    for (double b : bond) m = std::max(m, std::abs(b));
    return m;
  }
  double d = 0.0;
  for (std::size_t b = 0; b < bond.size(); ++b) {
    const double lead = b < source_site ? left_lead : right_lead;
    d = std::max(d, std::abs(bond[b] - lead) / ref);
  }
  return d;
}

CoherentCurrent coherent_current_density(const NegfModel& model, double energy,
                                         double injection_rate, std::size_t source_site,
                                         const PhysicalUnits& units) {
  if (!(injection_rate >= 0.0) || !std::isfinite(injection_rate))
    throw InvalidArgument("injection rate must be finite and non-negative");
  const GreensRow row = compute_green_row(model, source_site, energy);
  const std::size_t n = model.size();
  const double a = model.lattice_constant;
  const double pref = injection_rate * 2.0 * a / units.hbar;
  CoherentCurrent c;
  c.energy = energy;
  c.source_site = source_site;
  c.bond.resize(n - 1);
  for (std::size_t b = 0; b + 1 < n; ++b)
    c.bond[b] = pref * model.hopping * (std::conj(row.values[b]) * row.values[b + 1]).imag();
  const auto [gl, gr] = lead_broadenings(model, energy);
  c.left_lead = -pref * 0.5 * gl * std::norm(row.values[0]);
  c.right_lead = pref * 0.5 * gr * std::norm(row.values[n - 1]);
  return c;
}

NegfModel NegfSweepSpec::model() const {
  NegfModel m;
  if (site_energies) {
    m.site_energies = *site_energies;
  } else {
    m.site_energies.assign(n_sites, 0.0);
    if (barrier_height != 0.0) {
      if (barrier_first > barrier_last || barrier_last >= n_sites)
        throw InvalidArgument("barrier sites outside the chain");
      for (std::size_t i = barrier_first; i <= barrier_last; ++i) m.site_energies[i] = barrier_height;
    }
  }
  m.hopping = hopping;
  m.lattice_constant = lattice_constant;
  m.lead_onsite_left = lead_onsite_left;
  m.lead_onsite_right = lead_onsite_right;
  m.broadening = broadening;
  m.validate();
  if (source_site >= m.size()) throw InvalidArgument("source site outside the chain");
  if (n_energies == 0) throw InvalidArgument("energy sweep needs at least one energy");
  if (!(e_max >= e_min)) throw InvalidArgument("energy sweep needs e_max >= e_min");
  return m;
}

std::vector<double> NegfSweepSpec::energies() const {
  std::vector<double> e(n_energies);
  for (std::size_t i = 0; i < n_energies; ++i) {
    e[i] = n_energies == 1 ? e_min
                           : e_min + (e_max - e_min) * static_cast<double>(i) /
                                         static_cast<double>(n_energies - 1);
  }
  return e;
}

std::vector<SweepPoint> run_sweep(const NegfSweepSpec& spec, const PhysicalUnits& units) {
  units.validate();
  const NegfModel model = spec.model();
  const std::vector<double> energies = spec.energies();
  std::vector<SweepPoint> out(energies.size());
  numerics::parallel_for(energies.size(), [&](std::size_t k) {
    SweepPoint& p = out[k];
    p.energy = energies[k];
    p.row = compute_green_row(model, spec.source_site, p.energy);
    p.velocity = phase_velocity(p.row, model, units);
    p.current = coherent_current_density(model, p.energy, spec.injection_rate, spec.source_site,
                                         units);
    p.transmission = transmission(model, p.energy);
  });
  return out;
}

}  // namespace bohmflow::negf
