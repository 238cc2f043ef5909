#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "bohmflow/grid.hpp"

namespace bohmflow::negf {

using cplx = std::complex<double>;

/// Nearest-neighbour tight-binding chain attached to two semi-infinite leads.
/// H_ii = site_energies[i], H_{i,i+1} = H_{i+1,i} = -hopping. The leads are uniform
/// chains with the same hopping and their own on-site energy, so a lead band
/// is E = onsite - 2 t cos(k a).
struct NegfModel {
  std::vector<double> site_energies;
  double hopping = 1.0;
  double lead_onsite_left = 0.0;
  double lead_onsite_right = 0.0;
  /// Optional E -> E + i*broadening; zero means the bare retarded limit.
  double broadening = 0.0;
  double lattice_constant = 1.0;

  std::size_t size() const noexcept { return site_energies.size(); }

  /// Throws InvalidArgument for fewer than 2 sites, zero hopping or negative broadening.
  void validate() const;

  static NegfModel uniform(std::size_t n_sites, double hopping, double onsite = 0.0);

  /// Uniform chain with site_energies = height on [first, last] (inclusive).
  static NegfModel with_barrier(std::size_t n_sites, double hopping, double height,
                                std::size_t first, std::size_t last);
};

/// Retarded self-energy of a semi-infinite uniform lead, Sigma = t^2 g_surface,
/// which equals -t exp(i k a) inside the band and decays outside it.
cplx lead_self_energy(double energy, double lead_onsite, double hopping, double broadening = 0.0);

/// Lead wavenumber k(E) in (0, pi/a) for an energy inside the lead band.
/// Throws InvalidArgument outside the band.
double lead_wavenumber(double energy, double lead_onsite, double hopping, double lattice_constant);

/// One column of G_R = (E - H - Sigma_L - Sigma_R)^-1, i.e. G_R(x, x') for a fixed
/// source x', with its polar split G = |G| exp(i theta).
struct GreensRow {
  std::size_t source_site = 0;
  double energy = 0.0;
  std::vector<cplx> values;
  std::vector<double> magnitude;
  /// Unwrapped along the chain starting at the source, theta(source) = arg G(source, source).
  std::vector<double> theta;
  /// magnitude above mask_fraction * max magnitude.
  std::vector<bool> valid;
};

inline constexpr double kGreenMaskFraction = 1e-10;

/// Throws NumericalError when the system is singular (band edge without broadening).
GreensRow compute_green_row(const NegfModel& model, std::size_t source_site, double energy);

/// Broadening functions Gamma = i (Sigma - Sigma^dagger) of the two leads.
std::pair<double, double> lead_broadenings(const NegfModel& model, double energy);

/// Fisher-Lee transmission Gamma_L Gamma_R |G_R(first, last)|^2.
double transmission(const NegfModel& model, double energy);

/// m_eff = hbar^2 / (2 t a^2), the mass whose parabolic band matches the chain at k -> 0.
double effective_mass(const NegfModel& model, const PhysicalUnits& units);

/// v(x) = hbar * grad(theta) / m_eff per site, with the central difference of the
/// unwrapped phase (one-sided at the chain ends). Masked sites are set to zero.
std::vector<double> phase_velocity(const GreensRow& row, const NegfModel& model,
                                   const PhysicalUnits& units);

/// Coherent current driven by a single source site with a constant injection
/// rate. Bond b connects sites b and b+1; on a lattice the phase gradient of a
/// bond is sin(theta_{b+1} - theta_b) / a and the density is |G_b| |G_{b+1}|,
/// which makes the bond current exactly conserved away from the source.
struct CoherentCurrent {
  double energy = 0.0;
  std::size_t source_site = 0;
  std::vector<double> bond;
  /// Outflow into the left lead (negative means leftward) and into the right lead.
  double left_lead = 0.0;
  double right_lead = 0.0;

  /// Max relative deviation of the current from its lead value on either side of the source.
  double max_divergence() const;
};

CoherentCurrent coherent_current_density(const NegfModel& model, double energy,
                                         double injection_rate, std::size_t source_site,
                                         const PhysicalUnits& units);

/// Energy-sweep description read from the [negf] config section.
struct NegfSweepSpec {
  std::size_t n_sites = 100;
  double hopping = 1.0;
  double lattice_constant = 1.0;
  std::optional<std::vector<double>> site_energies;
  double barrier_height = 0.0;
  std::size_t barrier_first = 0;
  std::size_t barrier_last = 0;
  double lead_onsite_left = 0.0;
  double lead_onsite_right = 0.0;
  double broadening = 0.0;
  std::size_t source_site = 0;
  double e_min = -1.0;
  double e_max = 1.0;
  std::size_t n_energies = 11;
  double injection_rate = 1.0;

  NegfModel model() const;
  std::vector<double> energies() const;
};

struct SweepPoint {
  double energy = 0.0;
  GreensRow row;
  std::vector<double> velocity;
  CoherentCurrent current;
  double transmission = 0.0;
};

/// Evaluates every energy of the sweep; energies run in parallel and the
/// result is ordered like energies(). Energies where the system is singular
/// propagate NumericalError.
std::vector<SweepPoint> run_sweep(const NegfSweepSpec& spec, const PhysicalUnits& units = {});

}  // namespace bohmflow::negf
