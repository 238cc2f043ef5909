#pragma once

// Transmission of a nearest-neighbour chain by wave matching, with no Green's
// functions involved. Sites 0..N-1 carry eps[i]; the leads are uniform chains
// with on-site eps_L / eps_R; every bond has hopping -t. In a lead,
// E = eps - 2 t cos k, and exp(i k n) moves right for t > 0.
//
// A purely transmitted wave exp(i k_R n) is placed on the first two right-lead
// sites and the tight-binding equation
//   psi_{n-1} = ((eps_n - E) / t) psi_n - psi_{n+1}
// is iterated back into the left lead, where psi = A exp(i k_L n) + B exp(-i k_L n).
// T = (sin k_R / sin k_L) / |A|^2.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace oracle {

inline double lead_k(double energy, double onsite, double t) {
  const double c = (onsite - energy) / (2.0 * t);
  if (!(std::abs(c) < 1.0)) throw std::domain_error("energy outside the lead band");
  return std::acos(c);
}

inline double transfer_matrix_transmission(const std::vector<double>& eps, double t, double energy,
                                           double eps_left = 0.0, double eps_right = 0.0) {
  using C = std::complex<double>;
  const double kl = lead_k(energy, eps_left, t);
  const double kr = lead_k(energy, eps_right, t);
  const auto n = static_cast<long>(eps.size());
  auto onsite = [&](long site) {
    if (site < 0) return eps_left;
    if (site >= n) return eps_right;
    return eps[static_cast<std::size_t>(site)];
  };
  // psi_hi = psi_{site + 1}, psi_lo = psi_site
  C psi_hi = std::exp(C(0.0, kr * static_cast<double>(n + 1)));
  C psi_lo = std::exp(C(0.0, kr * static_cast<double>(n)));
  for (long site = n; site > -2; --site) {
    const C below = (onsite(site) - energy) / t * psi_lo - psi_hi;
    psi_hi = psi_lo;
    psi_lo = below;
  }
  // psi_lo = psi_{-2}, psi_hi = psi_{-1}
  const C e1 = std::exp(C(0.0, -kl));
  const C e2 = std::exp(C(0.0, -2.0 * kl));
  // Solve A e1 + B / e1 = psi_{-1}, A e2 + B / e2 = psi_{-2}.
  const C det = e1 / e2 - e2 / e1;
  const C A = (psi_hi / e2 - psi_lo / e1) / det;
  return (std::sin(kr) / std::sin(kl)) / std::norm(A);
}

}  // namespace oracle
