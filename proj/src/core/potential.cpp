#include "bohmflow/potential.hpp"

#include <cmath>

#include "bohmflow/detail/overloaded.hpp"
#include "bohmflow/errors.hpp"

namespace bohmflow {

using detail::Overloaded;

std::string potential_name(const PotentialSpec& spec) {
  return std::visit(Overloaded{
                        [](const potentials::Free&) { return std::string("free"); },
                        [](const potentials::Harmonic&) { return std::string("harmonic"); },
                        [](const potentials::RectangularBarrier&) {
                          return std::string("rectangular_barrier");
                        },
                        [](const potentials::Tabulated&) { return std::string("tabulated"); },
                    },
                    spec);
}

void validate_potential(const PotentialSpec& spec, const Grid1D& grid) {
  std::visit(Overloaded{
                 [](const potentials::Free&) {},
                 [](const potentials::Harmonic& h) {
                   if (!(h.omega > 0.0) || !std::isfinite(h.omega))
                     throw InvalidArgument("harmonic potential needs omega > 0");
                 },
                 [&](const potentials::RectangularBarrier& r) {
                   if (!(r.a < r.b)) throw InvalidArgument("rectangular barrier needs a < b");
                   if (!(r.a > grid.x_min() && r.b < grid.x_max()))
                     throw InvalidArgument("rectangular barrier [a, b] must lie inside the grid");
                   if (!std::isfinite(r.v0)) throw InvalidArgument("barrier height must be finite");
                 },
                 [&](const potentials::Tabulated& t) {
                   if (t.values.size() != grid.size())
                     throw InvalidArgument("tabulated potential has " +
                                           std::to_string(t.values.size()) + " values, grid has " +
                                           std::to_string(grid.size()));
                 },
             },
             spec);
}

std::vector<double> evaluate_potential(const PotentialSpec& spec, const Grid1D& grid,
                                       const PhysicalUnits& units) {
  validate_potential(spec, grid);
  const std::size_t n = grid.size();
  std::vector<double> v(n, 0.0);
  std::visit(Overloaded{
                 [](const potentials::Free&) {},
                 [&](const potentials::Harmonic& h) {
                   const double k = units.mass * h.omega * h.omega;
                   for (std::size_t i = 0; i < n; ++i) {
                     const double x = grid.x(i);
                     v[i] = 0.5 * k * x * x;
                   }
                 },
                 [&](const potentials::RectangularBarrier& r) {
                   for (std::size_t i = 0; i < n; ++i) {
                     const double x = grid.x(i);
                     if (x >= r.a && x <= r.b) v[i] = r.v0;
                   }
                 },
                 [&](const potentials::Tabulated& t) { v = t.values; },
             },
             spec);
  return v;
}

}  // namespace bohmflow
