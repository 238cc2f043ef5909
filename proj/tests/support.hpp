#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "bohmflow/wavefunction.hpp"

namespace testing {

using bohmflow::cplx;

inline bohmflow::WavefunctionFrame sample(const bohmflow::Grid1D& grid,
                                          const std::function<cplx(double)>& f, double t = 0.0) {
  bohmflow::WavefunctionFrame frame{grid, t, std::vector<cplx>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) frame.values[i] = f(grid.x(i));
  return frame;
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// max |a - b| over points where the mask is set (all points without one).
inline double max_diff(std::span<const double> a, std::span<const double> b,
                       const std::vector<bool>& mask = {}) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (mask.empty() || mask[i]) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_diff(std::span<const double> a, const std::function<double(std::size_t)>& b,
                       const std::vector<bool>& mask = {}) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (mask.empty() || mask[i]) m = std::max(m, std::abs(a[i] - b(i)));
  return m;
}

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("bohmflow_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
