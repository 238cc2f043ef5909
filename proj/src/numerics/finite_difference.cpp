#include "bohmflow/numerics/finite_difference.hpp"

#include "bohmflow/errors.hpp"

namespace bohmflow::numerics {

namespace {

// Strided views let the 2D routines reuse the 1D stencils.
template <class T>
void d1(const T* f, std::size_t n, std::size_t stride, double dx, T* out) {
  const double h = 1.0 / dx;
  auto at = [&](std::size_t i) -> const T& { return f[i * stride]; };
  auto put = [&](std::size_t i, const T& v) { out[i * stride] = v; };
  put(0, (-3.0 * at(0) + 4.0 * at(1) - at(2)) * (0.5 * h));
  put(n - 1, (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) * (0.5 * h));
  put(1, (at(2) - at(0)) * (0.5 * h));
  put(n - 2, (at(n - 1) - at(n - 3)) * (0.5 * h));
  for (std::size_t i = 2; i + 2 < n; ++i) {
    put(i, ((at(i - 2) - at(i + 2)) + 8.0 * (at(i + 1) - at(i - 1))) * (h / 12.0));
  }
}

template <class T>
void d2(const T* f, std::size_t n, std::size_t stride, double dx, T* out) {
  const double h2 = 1.0 / (dx * dx);
  auto at = [&](std::size_t i) -> const T& { return f[i * stride]; };
  auto put = [&](std::size_t i, const T& v) { out[i * stride] = v; };
  put(0, (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) * h2);
  put(n - 1, (2.0 * at(n - 1) - 5.0 * at(n - 2) + 4.0 * at(n - 3) - at(n - 4)) * h2);
  put(1, (at(0) - 2.0 * at(1) + at(2)) * h2);
  put(n - 2, (at(n - 3) - 2.0 * at(n - 2) + at(n - 1)) * h2);
  for (std::size_t i = 2; i + 2 < n; ++i) {
    put(i, (-(at(i - 2) + at(i + 2)) + 16.0 * (at(i - 1) + at(i + 1)) - 30.0 * at(i)) *
               (h2 / 12.0));
  }
}

void require_size(std::size_t n) {
  if (n < 5) throw InvalidArgument("finite-difference stencils need at least 5 points");
}

template <class T>
std::vector<T> apply1(std::span<const T> f, double dx) {
  require_size(f.size());
  std::vector<T> out(f.size());
  d1(f.data(), f.size(), 1, dx, out.data());
  return out;
}

template <class T>
std::vector<T> apply2(std::span<const T> f, double dx) {
  require_size(f.size());
  std::vector<T> out(f.size());
  d2(f.data(), f.size(), 1, dx, out.data());
  return out;
}

}  // namespace

std::vector<double> first_derivative(std::span<const double> f, double dx) {
  return apply1(f, dx);
}

std::vector<std::complex<double>> first_derivative(std::span<const std::complex<double>> f,
                                                   double dx) {
  return apply1(f, dx);
}

std::vector<double> second_derivative(std::span<const double> f, double dx) {
  return apply2(f, dx);
}

std::vector<std::complex<double>> second_derivative(std::span<const std::complex<double>> f,
                                                    double dx) {
  return apply2(f, dx);
}

std::vector<double> second_derivative_2d(std::span<const double> f, std::size_t n, int axis,
                                         double dx) {
  require_size(n);
  if (f.size() != n * n) throw InvalidArgument("2D field size does not match n x n");
  std::vector<double> out(f.size());
  for (std::size_t k = 0; k < n; ++k) {
    if (axis == 0) {
      d2(f.data() + k, n, n, dx, out.data() + k);
    } else {
      d2(f.data() + k * n, n, 1, dx, out.data() + k * n);
    }
  }
  return out;
}

}  // namespace bohmflow::numerics
