#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace bohmflow::cli {

enum ExitCode : int {
  kOk = 0,
  kIoFailure = 1,
  kConfigError = 2,
  kNumericalFailure = 3,
  kToleranceFailure = 4,
};

struct Options {
  std::string subcommand;
  std::filesystem::path config;
  std::filesystem::path out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_traj;
  std::string tolerance_profile = "default";
};

/// Runs one subcommand (simulate, diagnose, trajectories, tunnel, negf, verify)
/// and maps failures onto ExitCode, printing the message to err.
int run(const Options& options, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to run().
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bohmflow::cli
