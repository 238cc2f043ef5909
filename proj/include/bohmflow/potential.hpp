#pragma once

#include <string>
#include <variant>
#include <vector>

#include "bohmflow/grid.hpp"

namespace bohmflow {

namespace potentials {

struct Free {};

/// V(x) = m omega^2 x^2 / 2
struct Harmonic {
  double omega = 1.0;
};

/// V(x) = v0 on [a, b], zero elsewhere.
struct RectangularBarrier {
  double v0 = 0.0;
  double a = 0.0;
  double b = 0.0;
};

/// One energy value per grid point.
struct Tabulated {
  std::vector<double> values;
};

}  // namespace potentials

using PotentialSpec = std::variant<potentials::Free, potentials::Harmonic,
                                   potentials::RectangularBarrier, potentials::Tabulated>;

std::string potential_name(const PotentialSpec& spec);

/// Throws InvalidArgument if the spec is inconsistent with the grid.
void validate_potential(const PotentialSpec& spec, const Grid1D& grid);

/// Pure function of position; throws InvalidArgument on an invalid spec.
std::vector<double> evaluate_potential(const PotentialSpec& spec, const Grid1D& grid,
                                       const PhysicalUnits& units = {});

}  // namespace bohmflow
