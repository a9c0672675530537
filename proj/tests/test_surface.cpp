#include <cmath>
#include <numbers>

#include "doctest.h"
#include "semipos/errors.hpp"
#include "semipos/surface.hpp"

using namespace semipos;
using std::numbers::pi;

TEST_CASE("vanishing order") {
  const auto m4 = SurfaceModel::cp1(4);
  CHECK(vanishing_order(m4, 0.0) == 4);
  CHECK(vanishing_order(m4, INFINITY) == 4);
  CHECK(vanishing_order(m4, 1.0) == 2);
  const auto m2 = SurfaceModel::cp1(2);
  for (double t : {0.0, 0.3, 1.0, 5.0}) CHECK(vanishing_order(m2, t) == 2);
  const auto c3 = SurfaceModel::circle(3, 2 * pi);
  CHECK(vanishing_order(c3, 1.0) == 3);
  CHECK(vanishing_order(c3, 0.0) == 2);
}

TEST_CASE("tau identities") {
  for (int r : {2, 4, 6}) {
    const auto m = SurfaceModel::cp1(r);
    for (double t : {0.0, 1e-3, 0.2, 0.7, 1.0, 1.9, 13.0, 400.0}) {
      const double lhs = tau(m, t) * m.reference_density(t);
      CHECK(std::abs(lhs - 2 * pi * m.b(t)) <= 1e-14 * std::max(1.0, 2 * pi * m.b(t)));
      CHECK(tau(m, t) >= 0.0);
      if (t > 0) CHECK(std::abs(tau(m, t) - tau(m, 1.0 / t)) < 1e-12 * std::max(1.0, tau(m, t)));
      if (t > 0) CHECK(std::abs(m.b(t) * t * t * t * t - m.b(1.0 / t)) < 1e-12 * std::max(1.0, m.b(1.0 / t)));
    }
  }
  const auto m2 = SurfaceModel::cp1(2);
  for (double t : {0.0, 0.5, 3.0}) CHECK(tau(m2, t) == doctest::Approx(2 * pi).epsilon(1e-14));
  const auto m4 = SurfaceModel::cp1(4);
  CHECK(tau(m4, 0.0) == 0.0);
  CHECK(tau(m4, 1.0) == doctest::Approx(8 * pi).epsilon(1e-14));
  // Positivity off the degeneracy set.
  for (double t : {1e-4, 0.5, 1.0, 50.0}) CHECK((tau(m4, t) > 0) == (vanishing_order(m4, t) == 2));
}

TEST_CASE("degree identity") {
  for (int r : {2, 4, 6, 8}) {
    const auto m = SurfaceModel::cp1(r);
    CHECK(std::abs(degree_by_quadrature(m) - r / 2.0) < 1e-10);
    CHECK(m.degree() == doctest::Approx(r / 2.0));
  }
}

TEST_CASE("flux derivative equals field times area element") {
  const double R2 = reference_radius() * reference_radius();
  for (const auto& m : {SurfaceModel::cp1(4), SurfaceModel::cp1(2), SurfaceModel::circle(3, 2 * pi),
                        SurfaceModel::circle(4, 6 * pi)}) {
    for (double th : {0.3, 1.0, 1.5, 2.4}) {
      const double h = 1e-5;
      const double da = (m.flux_theta(th + h) - m.flux_theta(th - h)) / (2 * h);
      CHECK(da == doctest::Approx(m.field_theta(th) * R2 * std::sin(th)).epsilon(1e-8));
    }
  }
  CHECK_THROWS_AS(SurfaceModel::circle(4, 1.0), DomainError);
  CHECK(SurfaceModel::circle(4, 6 * pi).degree() == doctest::Approx(1.0));
}

TEST_CASE("jet coefficient by finite differences in geodesic coordinates") {
  CHECK(jet_coefficient(SurfaceModel::cp1(2), Pole::north) == doctest::Approx(2 * pi));
  CHECK(jet_coefficient(SurfaceModel::cp1(4), Pole::north) == doctest::Approx(8 * pi * pi));
  for (int r : {4, 6}) {
    const auto m = SurfaceModel::cp1(r);
    // Geodesic distance from the pole on the area-1 round sphere is R·θ.
    const double R = reference_radius();
    const double th1 = 1e-3, th2 = 2e-3;
    const double b1 = m.field_theta(th1) / std::pow(R * th1, r - 2);
    const double b2 = m.field_theta(th2) / std::pow(R * th2, r - 2);
    const double extrapolated = (4 * b1 - b2) / 3;  // error is O(θ²)
    CHECK(extrapolated == doctest::Approx(jet_coefficient(m, Pole::north)).epsilon(1e-6));
    CHECK(jet_coefficient(m, Pole::south) == jet_coefficient(m, Pole::north));
  }
  CHECK_THROWS_AS(jet_coefficient(SurfaceModel::cp1(4), Pole::equator), DomainError);
  const auto c = SurfaceModel::circle(3, 2 * pi);
  const double R = reference_radius();
  const double y = 1e-4;
  const double fd = -(c.field_theta(pi / 2 + y / R) - c.field_theta(pi / 2 - y / R)) / (2 * y);
  CHECK(fd == doctest::Approx(jet_coefficient(c, Pole::equator)).epsilon(1e-7));
}
