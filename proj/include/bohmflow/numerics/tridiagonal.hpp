#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bohmflow/errors.hpp"

namespace bohmflow::numerics {

/// Thomas-algorithm factorization of a tridiagonal matrix, reusable across
/// right-hand sides. No pivoting: a pivot whose magnitude falls below
/// pivot_tolerance times the row scale throws NumericalError.
///
/// lower[i] couples row i to column i-1 (lower[0] unused),
/// upper[i] couples row i to column i+1 (upper[n-1] unused).
template <class T>
class TridiagonalFactor {
 public:
  TridiagonalFactor(std::span<const T> lower, std::span<const T> diag, std::span<const T> upper,
                    double pivot_tolerance = 1e-13)
      : lower_(lower.begin(), lower.end()), c_star_(diag.size()), inv_pivot_(diag.size()) {
    const std::size_t n = diag.size();
    if (n == 0 || lower.size() != n || upper.size() != n)
      throw InvalidArgument("tridiagonal bands must have equal, non-zero length");
    T prev_c{};
    for (std::size_t i = 0; i < n; ++i) {
      const T pivot = (i == 0) ? diag[0] : diag[i] - lower[i] * prev_c;
      double scale = std::abs(diag[i]);
      if (i > 0) scale += std::abs(lower[i]);
      if (i + 1 < n) scale += std::abs(upper[i]);
      if (!(std::abs(pivot) > pivot_tolerance * scale)) {
        throw NumericalError("tridiagonal elimination broke down: vanishing pivot at row " +
                             std::to_string(i));
      }
      inv_pivot_[i] = T(1) / pivot;
      prev_c = (i + 1 < n) ? upper[i] * inv_pivot_[i] : T{};
      c_star_[i] = prev_c;
    }
  }

  std::size_t size() const noexcept { return c_star_.size(); }

  /// Solves in place: x holds the right-hand side on entry and the solution on exit.
  void solve_in_place(std::span<T> x) const {
    const std::size_t n = size();
    if (x.size() != n) throw InvalidArgument("right-hand side size mismatch");
    x[0] *= inv_pivot_[0];
    for (std::size_t i = 1; i < n; ++i) x[i] = (x[i] - lower_[i] * x[i - 1]) * inv_pivot_[i];
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= c_star_[i] * x[i + 1];
  }

  std::vector<T> solve(std::span<const T> rhs) const {
    std::vector<T> x(rhs.begin(), rhs.end());
    solve_in_place(x);
    return x;
  }

 private:
  std::vector<T> lower_;
  std::vector<T> c_star_;
  std::vector<T> inv_pivot_;
};

template <class T>
std::vector<T> solve_tridiagonal(std::span<const T> lower, std::span<const T> diag,
                                 std::span<const T> upper, std::span<const T> rhs) {
  return TridiagonalFactor<T>(lower, diag, upper).solve(rhs);
}

}  // namespace bohmflow::numerics
