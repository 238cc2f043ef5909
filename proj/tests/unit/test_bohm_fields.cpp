#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "bohmflow/bohm_fields.hpp"
#include "bohmflow/errors.hpp"
#include "bohmflow/wavefunction.hpp"
#include "oracles/free_gaussian.hpp"
#include "oracles/harmonic.hpp"
#include "support.hpp"

using namespace bohmflow;
using testing::max_abs;
using testing::max_diff;

namespace {

const Grid1D kGrid(-10.0, 10.0, 2001);

WavefunctionFrame harmonic_state(unsigned n, const Grid1D& grid = kGrid) {
  return init_wavefunction(initial_states::HarmonicEigenstate{n}, grid, {}, potentials::Harmonic{1.0});
}

std::size_t count(const std::vector<bool>& m) { return static_cast<std::size_t>(std::count(m.begin(), m.end(), true)); }

}  // namespace

TEST_SUITE("polar") {
  TEST_CASE("reconstruction, anchor and continuity") {
    const oracle::FreeGaussian g{-1.0, 1.2, 1.7};
    const auto f = testing::sample(kGrid, [&](double x) { return g.psi(x, 0.8); }, 0.8);
    const auto pf = polar_decompose(f);
    const auto anchor = static_cast<std::size_t>(std::max_element(pf.R.begin(), pf.R.end()) - pf.R.begin());
    CHECK(pf.S[anchor] == 0.0);
    const cplx rot = f.values[anchor] / std::abs(f.values[anchor]);
    const double peak = pf.R[anchor];
    for (std::size_t i = 0; i < f.size(); ++i) {
      CHECK(pf.R[i] == std::abs(f.values[i]));
      if (!(pf.R[i] > kDefaultNodeEpsilon * peak)) continue;
      const cplx rebuilt = pf.R[i] * std::exp(cplx(0.0, pf.S[i])) * rot;
      REQUIRE(std::abs(rebuilt - f.values[i]) <= 1e-12 * pf.R[i]);
      if (i + 1 < f.size() && pf.R[i + 1] > kDefaultNodeEpsilon * peak)
        CHECK(std::abs(pf.S[i + 1] - pf.S[i]) < std::numbers::pi);
    }
  }

  TEST_CASE("real positive field has zero action") {
    const auto pf = polar_decompose(harmonic_state(0));
    CHECK(max_abs(pf.S) == 0.0);
  }

  TEST_CASE("plane wave action is linear") {
    const double k0 = 1.3, hbar = 0.7;
    const auto f = init_wavefunction(initial_states::PlaneWave{k0}, kGrid);
    const auto pf = polar_decompose(f, {hbar, 1.0});
    const auto anchor = static_cast<std::size_t>(std::max_element(pf.R.begin(), pf.R.end()) - pf.R.begin());
    CHECK(pf.S[anchor] == 0.0);
    CHECK(max_diff(pf.S, [&](std::size_t i) { return hbar * k0 * (kGrid.x(i) - kGrid.x(anchor)); }) < 1e-10);
  }

  TEST_CASE("Gaussian with k0 = 2 has a uniform action gradient") {
    const auto f = init_wavefunction(initial_states::Gaussian{0.0, 1.0, 2.0}, kGrid);
    const auto pf = polar_decompose(f);
    for (std::size_t i = 0; i + 1 < f.size(); ++i)
      if (pf.valid[i] && pf.valid[i + 1]) CHECK((pf.S[i + 1] - pf.S[i]) / kGrid.dx() == doctest::Approx(2.0).epsilon(1e-9));
  }

  TEST_CASE("unwrapping steps over a node") {
    // Real field with a sign change: the phase jumps by pi across the node,
    // and is flat on both sides.
    const auto f = harmonic_state(1);
    const auto pf = polar_decompose(f);
    for (std::size_t i = 0; i + 1 < f.size(); ++i)
      if (pf.valid[i] && pf.valid[i + 1]) CHECK(pf.S[i + 1] == pf.S[i]);
    CHECK_FALSE(pf.valid[1000]);
  }
}

TEST_SUITE("momentum fields") {
  TEST_CASE("plane wave") {
    // The plane wave is the one state that reaches the walls, where the stencils
    // drop to second order; the interior stencil error is (k dx)^4 / 30 relative.
    const Grid1D grid(-5.0, 5.0, 4001);
    const auto f = init_wavefunction(initial_states::PlaneWave{2.0}, grid);
    const auto b = compute_bohm_fields(f);
    CHECK(count(b.valid) == f.size());
    std::vector<bool> interior(f.size(), true);
    interior[0] = interior[1] = interior[f.size() - 2] = interior[f.size() - 1] = false;
    CHECK(max_diff(b.p_R, [](std::size_t) { return 2.0; }, interior) < 1e-10);
    CHECK(max_diff(b.p_I, [](std::size_t) { return 0.0; }, interior) < 1e-10);
    CHECK(max_diff(b.v_r, [](std::size_t) { return 2.0; }, interior) < 1e-10);
    CHECK(max_abs(b.V_qu) < 1e-8);
    CHECK(max_diff(b.p_R, [](std::size_t) { return 2.0; }) < 1e-3);
  }

  TEST_CASE("harmonic ground state") {
    const auto f = harmonic_state(0);
    const auto b = compute_bohm_fields(f);
    const oracle::Harmonic h;
    CHECK(max_abs(b.p_R) == 0.0);
    CHECK(max_abs(b.v_r) == 0.0);
    CHECK(max_abs(b.J) == 0.0);
    // Fourth-order differences of a Gaussian: the error grows like x^5 dx^4.
    CHECK(max_diff(b.p_I, [&](std::size_t i) { return h.ground_p_I(kGrid.x(i)); }, b.valid) < 1e-5);
    CHECK(max_diff(b.V_qu, [&](std::size_t i) { return h.ground_quantum_potential(kGrid.x(i)); }, b.valid) < 1e-4);
    std::vector<bool> core(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) core[i] = b.valid[i] && std::abs(kGrid.x(i)) < 4.0;
    CHECK(max_diff(b.p_I, [&](std::size_t i) { return kGrid.x(i); }, core) < 1e-6);
    CHECK(max_diff(b.V_qu, [&](std::size_t i) { return 0.5 - 0.5 * kGrid.x(i) * kGrid.x(i); }, core) < 1e-7);
  }

  TEST_CASE("Gaussian at t = 0: p_I and V_qu") {
    const double s0 = 0.9;
    const auto f = init_wavefunction(initial_states::Gaussian{0.0, s0, 1.5}, kGrid);
    const auto b = compute_bohm_fields(f);
    std::vector<bool> core(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) core[i] = b.valid[i] && std::abs(kGrid.x(i)) < 5.0 * s0;
    CHECK(max_diff(b.p_I, [&](std::size_t i) { return kGrid.x(i) / (2.0 * s0 * s0); }, core) < 1e-6);
    CHECK(max_diff(b.V_qu, [&](std::size_t i) {
            const double x = kGrid.x(i);
            return (1.0 - x * x / (2.0 * s0 * s0)) / (4.0 * s0 * s0);
          }, core) < 1e-6);
  }

  TEST_CASE("free Gaussian at t > 0 against the closed form") {
    const PhysicalUnits units{0.8, 1.4};
    const oracle::FreeGaussian g{-1.0, 1.1, 2.0, units.hbar, units.mass};
    const double t = 1.7;
    const auto f = testing::sample(kGrid, [&](double x) { return g.psi(x, t); }, t);
    const auto b = compute_bohm_fields(f, units);
    std::vector<bool> core(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
      core[i] = b.valid[i] && std::abs(kGrid.x(i) - g.centre(t)) < 5.0 * g.sigma(t);
    REQUIRE(count(core) > 500);
    const double p_scale = max_abs(b.p_R);
    CHECK(max_diff(b.p_R, [&](std::size_t i) { return g.p_R(kGrid.x(i), t); }, core) < 1e-4 * p_scale);
    CHECK(max_diff(b.p_I, [&](std::size_t i) { return g.p_I(kGrid.x(i), t); }, core) < 1e-4 * p_scale);
    CHECK(max_diff(b.v_r, [&](std::size_t i) { return g.velocity(kGrid.x(i), t); }, core) < 1e-4 * p_scale / units.mass);
    CHECK(max_diff(b.V_qu, [&](std::size_t i) { return g.quantum_potential(kGrid.x(i), t); }, core) <
          1e-4 * max_abs(b.V_qu));
    const double j_scale = max_abs(b.J);
    CHECK(max_diff(b.J, [&](std::size_t i) { return g.density(kGrid.x(i), t) * g.velocity(kGrid.x(i), t); }) <
          1e-4 * j_scale);
    CHECK(max_diff(b.P, [&](std::size_t i) { return std::norm(f.values[i]); }) == 0.0);
  }

  TEST_CASE("single-field entry points match the bundle") {
    const oracle::FreeGaussian g{0.5, 0.9, -1.0};
    const auto f = testing::sample(kGrid, [&](double x) { return g.psi(x, 0.4); }, 0.4);
    const auto b = compute_bohm_fields(f);
    CHECK(compute_p_R(f) == b.p_R);
    CHECK(compute_p_I(f) == b.p_I);
    CHECK(compute_quantum_potential(f) == b.V_qu);
    const auto vj = compute_velocity_and_current(f);
    CHECK(vj.v_r == b.v_r);
    CHECK(vj.J == b.J);
    CHECK(vj.valid == b.valid);
  }
}

TEST_SUITE("field invariants") {
  TEST_CASE("decomposition closure and form agreement") {
    // -hbar R'/R agrees with p_I only where both use the interior stencil, so
    // the packet must have decayed below the node floor before the walls.
    const oracle::FreeGaussian g{-2.5, 0.8, 2.5};
    const Grid1D wide(-14.0, 14.0, 2801);
    for (const auto& f : {testing::sample(wide, [&](double x) { return g.psi(x, 1.1); }, 1.1),
                          harmonic_state(1), harmonic_state(3)}) {
      const auto c = cross_check_fields(f);
      CHECK(c.decomposition_closure < 1e-10);
      CHECK(c.p_R_forms < 1e-10);
      CHECK(c.current_consistency < 1e-10);
      CHECK(c.p_I_forms < 1e-6);
      const auto b = compute_bohm_fields(f);
      for (std::size_t i = 0; i < f.size(); ++i)
        if (b.valid[i]) REQUIRE(std::abs(b.J[i] - b.P[i] * b.v_r[i]) <= 1e-10 * (max_abs(b.J) + 1e-300));
    }
  }

  TEST_CASE("real fields carry no current") {
    for (unsigned n : {0u, 1u, 2u, 5u}) {
      auto f = harmonic_state(n);
      for (auto& v : f.values) v = -v.real();
      const auto b = compute_bohm_fields(f);
      CHECK(max_diff(b.p_R, [](std::size_t) { return 0.0; }, b.valid) == 0.0);
      CHECK(max_abs(b.J) == 0.0);
    }
  }

  TEST_CASE("global phase changes nothing") {
    const Grid1D grid(-10.0, 10.0, 401);
    const oracle::FreeGaussian g{0.0, 1.0, 1.0};
    const auto f = testing::sample(grid, [&](double x) { return g.psi(x, 0.5); }, 0.5);
    const auto base = compute_bohm_fields(f);
    for (double alpha : {0.3, 1.9, -2.7, std::numbers::pi}) {
      auto h = f;
      for (auto& v : h.values) v *= std::polar(1.0, alpha);
      const auto b = compute_bohm_fields(h);
      CHECK(b.valid == base.valid);
      CHECK(max_diff(b.p_R, base.p_R) < 1e-12);
      CHECK(max_diff(b.p_I, base.p_I) < 1e-12);
      CHECK(max_diff(b.v_r, base.v_r) < 1e-12);
      CHECK(max_diff(b.V_qu, base.V_qu) < 1e-12);
      CHECK(max_diff(b.J, base.J) < 1e-12);
    }
  }

  TEST_CASE("mask") {
    for (unsigned n : {0u, 1u, 2u, 4u}) {
      const auto f = harmonic_state(n);
      const auto b = compute_bohm_fields(f);
      const double peak = max_abs(std::vector<double>(b.P.begin(), b.P.end()));
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (!b.valid[i]) {
          CHECK(b.p_R[i] == 0.0);
          CHECK(b.V_qu[i] == 0.0);
          continue;
        }
        REQUIRE(std::sqrt(b.P[i]) > kDefaultNodeEpsilon * std::sqrt(peak));
      }
    }
    // The node of the first excited state and its stencil neighbours are masked.
    const auto v = valid_mask(harmonic_state(1).values, kDefaultNodeEpsilon);
    for (std::size_t i = 998; i <= 1002; ++i) CHECK_FALSE(v[i]);
    CHECK(v[997]);
    CHECK(v[1003]);
    // Tails below the floor are masked too.
    CHECK_FALSE(v.front());
    CHECK_FALSE(v.back());
  }

  TEST_CASE("sign change between samples is a node") {
    const Grid1D grid(-5.0, 5.0, 100);  // x = 0 is not a grid point
    const auto f = testing::sample(grid, [](double x) { return cplx(x * std::exp(-x * x), 0.0); });
    const auto nodes = node_points(f.values, kDefaultNodeEpsilon);
    CHECK(nodes[49]);
    CHECK(nodes[50]);
    CHECK_THROWS_AS(node_points(f.values, 0.0), InvalidArgument);
    CHECK_THROWS_AS(node_points(f.values, 0.5), InvalidArgument);
  }

  TEST_CASE("momentum rule on an arbitrary field") {
    // f = x^2 + 1 has a real logarithmic derivative 2x / (x^2 + 1).
    const Grid1D grid(-3.0, 3.0, 601);
    std::vector<cplx> f(grid.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = grid.x(i) * grid.x(i) + 1.0;
    const auto m = apply_momentum_rule(f, grid.dx());
    CHECK(max_abs(m.real) < 1e-12);
    CHECK(max_diff(m.imag, [&](std::size_t i) {
            const double x = grid.x(i);
            return -2.0 * x / (x * x + 1.0);
          }, m.valid) < 1e-5);
  }
}

TEST_SUITE("two particles") {
  const Grid1D grid2(-6.0, 6.0, 64);

  std::vector<cplx> on_product(const Grid1D& g, const std::function<cplx(double, double)>& f) {
    std::vector<cplx> out(g.size() * g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = 0; j < g.size(); ++j) out[i * g.size() + j] = f(g.x(i), g.x(j));
    return out;
  }

  cplx bump(double x, double c, double s, double k) {
    return std::exp(cplx(-(x - c) * (x - c) / (4.0 * s * s), k * x));
  }

  TEST_CASE("product state is separable") {
    auto a = [](double x) { return bump(x, -1.0, 0.8, 0.5); };
    auto b = [](double x) { return bump(x, 1.5, 1.2, -1.0); };
    const auto psi = on_product(grid2, [&](double x1, double x2) { return a(x1) * b(x2); });
    const auto vq = compute_quantum_potential_2particle(psi, grid2);
    const auto va = compute_quantum_potential(testing::sample(grid2, a));
    const auto vb = compute_quantum_potential(testing::sample(grid2, b));
    const auto ma = valid_mask(testing::sample(grid2, a).values, kDefaultNodeEpsilon);
    const auto mb = valid_mask(testing::sample(grid2, b).values, kDefaultNodeEpsilon);
    std::size_t compared = 0;
    for (std::size_t i = 0; i < grid2.size(); ++i)
      for (std::size_t j = 0; j < grid2.size(); ++j) {
        if (!vq.valid[i * grid2.size() + j] || !ma[i] || !mb[j]) continue;
        ++compared;
        REQUIRE(std::abs(vq.at(i, j) - (va[i] + vb[j])) < 1e-8);
      }
    CHECK(compared > 1000);
    CHECK(separability_defect(vq, psi) < 1e-8);
  }

  TEST_CASE("exchange-symmetric pair") {
    const auto psi = on_product(grid2, [](double x1, double x2) {
      return bump(x1, -1.5, 0.9, 0.0) * bump(x2, 1.5, 0.9, 0.0) +
             bump(x1, 1.5, 0.9, 0.0) * bump(x2, -1.5, 0.9, 0.0);
    });
    const auto vq = compute_quantum_potential_2particle(psi, grid2);
    for (std::size_t i = 0; i < grid2.size(); ++i)
      for (std::size_t j = 0; j < grid2.size(); ++j) {
        CHECK(vq.valid[i * 64 + j] == vq.valid[j * 64 + i]);
        if (vq.valid[i * 64 + j]) REQUIRE(std::abs(vq.at(i, j) - vq.at(j, i)) < 1e-10);
      }
  }

  TEST_CASE("entangled superposition is not separable") {
    const auto psi = on_product(grid2, [](double x1, double x2) {
      return bump(x1, -2.0, 0.7, 0.0) * bump(x2, 2.0, 0.7, 0.0) +
             bump(x1, 1.0, 1.0, 0.0) * bump(x2, -1.0, 1.0, 0.0);
    });
    const auto vq = compute_quantum_potential_2particle(psi, grid2);
    CHECK(separability_defect(vq, psi) > 10.0 * 1e-8);
  }
}
