#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "bohmflow/grid.hpp"
#include "bohmflow/negf.hpp"
#include "bohmflow/potential.hpp"
#include "bohmflow/wavefunction.hpp"

namespace bohmflow {

inline constexpr double kDefaultNodeEpsilon = 1e-10;

/// Everything needed to run one simulation. The on-disk schema is documented
/// in README.md; every field here maps to one key.
struct SimulationConfig {
  Grid1D grid{-10.0, 10.0, 2048};
  PhysicalUnits units{};
  PotentialSpec potential = potentials::Free{};
  InitialStateSpec initial_state = initial_states::Gaussian{};
  double dt = 1e-3;
  std::size_t n_steps = 0;
  std::size_t frame_stride = 1;
  double node_epsilon = kDefaultNodeEpsilon;
  std::uint64_t seed = 0;

  std::size_t n_traj = 1000;
  std::optional<negf::NegfSweepSpec> negf;

  /// Throws InvalidArgument on any violated invariant.
  void validate() const;

  double final_time() const { return dt * static_cast<double>(n_steps); }
};

/// Parses the structured-text format. Throws ConfigError with the offending line.
SimulationConfig parse_config(std::string_view text, const std::string& source = "<config>");

/// Reads and parses a file. Missing or unreadable files raise ConfigError at line 0.
SimulationConfig load_config(const std::filesystem::path& path);

}  // namespace bohmflow
