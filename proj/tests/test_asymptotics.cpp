#include <cmath>
#include <numbers>

#include "doctest.h"
#include "semipos/asymptotics.hpp"
#include "semipos/errors.hpp"
#include "semipos/surface.hpp"

using namespace semipos;

constexpr double kPi = std::numbers::pi;

TEST_CASE("R_t values and the τ = 0 branch") {
  for (double t : {0.01, 1.0, 7.0}) {
    const auto z = rt_eval(0.0, t);
    CHECK(z.functions == doctest::Approx(1.0 / (2 * kPi * t)).epsilon(1e-15));
    CHECK(z.forms == z.functions);
    for (double tau : {1e-9, 1e-12, 1e-15}) {
      // R_t = 1/(2πt) ± τ/4π + O(tτ²) on functions and forms.
      const auto v = rt_eval(tau, t);
      CHECK(std::abs(v.functions - z.functions - tau / (4 * kPi)) <= 1e-10 * z.functions);
      CHECK(std::abs(v.forms - z.forms + tau / (4 * kPi)) <= 1e-10 * z.forms);
      if (tau * t < 1e-11) CHECK(std::abs(v.forms - z.forms) <= 1e-10 * z.forms);
    }
  }
  const auto v = rt_eval(2.0, 0.5);
  CHECK(v.functions == doctest::Approx(2.0 / (2 * kPi * (1 - std::exp(-1.0)))));
  CHECK(v.forms == doctest::Approx(v.functions * std::exp(-1.0)));
  for (double tau : {0.1, 2 * kPi, 50.0})
    for (double t : {1e-3, 0.4, 3.0, 40.0}) CHECK(rt_eval(tau, t).forms <= rt_eval(tau, t).functions);
  CHECK_THROWS_AS(rt_eval(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(rt_eval(1.0, -1.0), DomainError);
  CHECK_THROWS_AS(rt_eval(-1.0, 1.0), DomainError);
}

TEST_CASE("A₀ from the small-t fit") {
  for (double tau : {0.0, 0.5, 2 * kPi, 8 * kPi, 300.0}) {
    const auto h = heat_coefficients(tau);
    CHECK(h.a_minus1 == doctest::Approx(1.0 / (2 * kPi)).epsilon(1e-9));
    CHECK(std::abs(h.a0 + tau / (4 * kPi)) <= 1e-7 * std::max(1.0, tau));
    CHECK(h.a0_error < 1e-6 * std::max(1.0, tau));
  }
}

TEST_CASE("torsion coefficients") {
  for (int r : {2, 4, 6, 8}) {
    const auto p = torsion_coefficients(SurfaceModel::cp1(r));
    CHECK(std::abs(p.A - r / 8.0) < 1e-10);
    CHECK(std::isfinite(p.B));
    CHECK(p.B_error < 1e-8);
  }
  CHECK(std::abs(torsion_coefficients(SurfaceModel::cp1(2)).B) < 1e-10);
  // Degenerate curvature pushes x ln x below its constant-curvature value.
  CHECK(torsion_coefficients(SurfaceModel::cp1(4)).B != 0.0);
  CHECK_THROWS_AS(torsion_coefficients(SurfaceModel::circle(3, 2 * kPi)), DomainError);
}

TEST_CASE("Riemann-Roch dimension") {
  CHECK(riemann_roch_dim(SurfaceModel::cp1(2), 10) == 11);
  CHECK(riemann_roch_dim(SurfaceModel::cp1(4), 10) == 21);
  CHECK(riemann_roch_dim(SurfaceModel::cp1(6), 3) == 10);
  CHECK(riemann_roch_dim(SurfaceModel::circle(3, 2 * kPi), 40) == 1);
  for (auto [r, k] : {std::pair{2, 16}, {4, 64}, {6, 16}}) {
    const auto c = dimension_check(SurfaceModel::cp1(r), k);
    CHECK(c.formula == r * k / 2 + 1);
    CHECK(c.basis_size == c.formula);
    CHECK(c.zero_modes == c.formula);
  }
}
