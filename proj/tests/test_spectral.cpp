#include <cmath>
#include <numbers>

#include "doctest.h"
#include "semipos/errors.hpp"
#include "semipos/numerics/stats.hpp"
#include "semipos/spectral.hpp"

using namespace semipos;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Landau levels on the round sphere of area 1 with flux k:
// (1/R²)[l(l+1) − k²/4] at l = k/2 + q, with 1/R² = 4π.
double landau(int k, int q) {
  const double l = 0.5 * k + q;
  return 4.0 * kPi * (l * (l + 1.0) - 0.25 * k * k);
}

}  // namespace

TEST_CASE("r = 2 sectors reproduce the Landau spectrum") {
  const auto model = SurfaceModel::cp1(2);
  for (int k : {4, 16, 64}) {
    for (int m : {0, k / 2, k}) {
      const auto ev = sector_eigenvalues(model, k, m, 3, LaplacianKind::bochner);
      for (int q = 0; q < 3; ++q) CHECK(rel(ev.values[q], landau(k, q)) < 1e-7);
    }
    // Sector −1 carries no holomorphic section; its bottom is the first excited level.
    CHECK(rel(sector_eigenvalues(model, k, -1, 1, LaplacianKind::bochner).values[0], landau(k, 1)) < 1e-7);
    CHECK(rel(lambda0(model, k).value / k, 2.0 * kPi) < 1e-5);
  }
  CHECK(landau(8, 1) == doctest::Approx(6.0 * kPi * 8 + 8.0 * kPi));
}

TEST_CASE("sector m and D − m are mirror images") {
  const auto model = SurfaceModel::cp1(4);
  const int k = 40, D = 80;
  for (int m : {0, 3, 17, -2}) {
    const auto a = sector_eigenvalues(model, k, m, 2, LaplacianKind::bochner);
    const auto b = sector_eigenvalues(model, k, D - m, 2, LaplacianKind::bochner);
    for (int j = 0; j < 2; ++j) CHECK(rel(a.values[j], b.values[j]) < 1e-7);
  }
}

TEST_CASE("holomorphic sections are discrete zero modes of 2□") {
  // |z^α| = t^α(1+t^r)^{−k/2} in the unitary frame; its Bochner quotient is
  // the k·τ average, so the Kodaira quotient vanishes up to O(h²).
  for (int r : {2, 4}) {
    const auto model = SurfaceModel::cp1(r);
    const int k = 12;
    for (int alpha : {0, 5, r * k / 2}) {
      const SectorDomain dom{0.0, kPi, true, true};
      double previous = 0.0;
      for (int n : {400, 800}) {
        const auto bo = assemble_sector(model, k, alpha, dom, n, LaplacianKind::bochner);
        const auto ko = assemble_sector(model, k, alpha, dom, n, LaplacianKind::kodaira);
        std::vector<double> u(n);
        double num = 0.0, den = 0.0;
        for (int i = 0; i < n; ++i) {
          const double t = t_of_theta(bo.theta[i]);
          u[i] = std::exp(alpha * std::log(t) - 0.5 * k * std::log1p(std::pow(t, r)));
          const double w = std::sin(bo.theta[i]);
          num += k * model.field_theta(bo.theta[i]) * u[i] * u[i] * w;
          den += u[i] * u[i] * w;
        }
        const double bochner = rayleigh_quotient(bo, u);
        CHECK(rel(bochner, num / den) < 1e-3);
        const double kodaira = std::abs(rayleigh_quotient(ko, u)) / bochner;
        CHECK(kodaira < 1e-3);
        if (n == 800) CHECK(kodaira < 0.35 * previous + 1e-12);
        previous = kodaira;
      }
    }
  }
}

TEST_CASE("grid refinement: errors bound the change under one more doubling") {
  const auto model = SurfaceModel::cp1(4);
  const int k = 256;
  const auto ev = sector_eigenvalues(model, k, 0, 3, LaplacianKind::bochner);
  const SectorDomain dom = sector_domain(model, k, 0, 2.0 * ev.values.back(), LaplacianKind::bochner);
  std::vector<double> v;
  for (int n : {1000, 2000, 4000}) v.push_back(tridiag_eigenvalue(assemble_sector(model, k, 0, dom, n, LaplacianKind::bochner).matrix, 0));
  // Second-order convergence of the raw values.
  CHECK((v[0] - v[1]) / (v[1] - v[2]) == doctest::Approx(4.0).epsilon(0.05));
  for (std::size_t j = 0; j < ev.values.size(); ++j) CHECK(ev.errors[j] < 1e-7 * ev.values[j]);
  // ev.nodes is the finest of three grids; shift the ladder up by one doubling.
  ModelGrid finer;
  finer.nodes = ev.nodes / 2;
  const auto ev2 = sector_eigenvalues(model, k, 0, 3, LaplacianKind::bochner, finer);
  for (std::size_t j = 0; j < ev.values.size(); ++j)
    CHECK(std::abs(ev2.values[j] - ev.values[j]) <= 2.0 * ev.errors[j] + 1e-9 * ev.values[j]);
}

TEST_CASE("sector minima leave any fixed window as |m| grows") {
  const auto model = SurfaceModel::cp1(4);
  const int k = 64, D = 128;
  double previous = 0.0;
  for (int m = D; m <= D + 12; ++m) {
    const double v = sector_eigenvalues(model, k, m, 1, LaplacianKind::bochner).values[0];
    CHECK(v > previous);
    previous = v;
  }
  previous = 0.0;
  for (int m = 0; m >= -12; --m) {
    const double v = sector_eigenvalues(model, k, m, 1, LaplacianKind::bochner).values[0];
    CHECK(v > previous);
    previous = v;
  }
  CHECK(previous > 4.0 * 30.0 * std::sqrt(k));
}

TEST_CASE("lambda0: r = 4 approaches the model constant") {
  const auto model = SurfaceModel::cp1(4);
  const double C = lambda0_model_constant(model);
  CHECK(C == doctest::Approx(11.5932).epsilon(1e-4));
  std::vector<double> ks, vs;
  for (int k : {64, 128, 256, 512, 1024, 2048}) {
    const auto l = lambda0(model, k);
    CHECK((l.sector == 0 || l.sector == 2 * k));
    ks.push_back(k);
    vs.push_back(l.value);
  }
  double previous = 1e300;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double scaled = vs[i] / std::sqrt(ks[i]);
    CHECK(scaled > C);
    CHECK(scaled < previous);
    previous = scaled;
  }
  CHECK(rel(previous, C) < 0.03);
  const auto probe = lambda0_expansion_probe(ks, vs, 4, C);
  CHECK_FALSE(probe.indeterminate);
  CHECK(probe.exponent >= -2.0 / 4 - 0.1);
  CHECK(probe.exponent <= -1.0 / 4 + 0.1);
}

TEST_CASE("lambda0 lower bound c1 k^{2/r} − c2 holds on a fresh range") {
  const auto model = SurfaceModel::cp1(4);
  std::vector<double> x, y;
  for (int k : {16, 32, 64, 128, 256}) {
    x.push_back(std::sqrt(k));
    y.push_back(lambda0(model, k).value);
  }
  const LinearFit fit = ols(x, y);
  const double c1 = 0.9 * fit.slope;
  const double c2 = std::abs(fit.intercept) + 10.0;
  for (int k : {512, 1024, 4096}) CHECK(lambda0(model, k).value >= c1 * std::sqrt(k) - c2);
}

TEST_CASE("expansion probe on synthetic data") {
  std::vector<double> ks, with, without;
  for (int j = 6; j <= 13; ++j) {
    const double k = std::ldexp(1.0, j);
    ks.push_back(k);
    with.push_back(std::sqrt(k) * (1.0 + std::pow(k, -0.25)));
    without.push_back(std::sqrt(k));
  }
  const auto p = lambda0_expansion_probe(ks, with, 4, 1.0);
  CHECK(p.exponent == doctest::Approx(-0.25).epsilon(0.02 / 0.25));
  CHECK_FALSE(p.indeterminate);
  CHECK(lambda0_expansion_probe(ks, without, 4, 1.0).indeterminate);
  CHECK_THROWS_AS(lambda0_expansion_probe({1, 2, 3}, {1, 2, 3}, 4, 1.0), SampleError);
}

TEST_CASE("circle profile: Montgomery constant and exponent") {
  const auto model = SurfaceModel::circle(3, 2 * kPi);
  const double C = lambda0_model_constant(model);
  std::vector<double> ks, vs;
  for (int k : {256, 512, 1024, 2048, 4096, 8192}) {
    ks.push_back(k);
    vs.push_back(lambda0(model, k).value);
  }
  CHECK(rel(vs.back() * std::pow(ks.back(), -2.0 / 3), C) < 0.01);
  const auto fit = fit_scaling(ks, vs);
  CHECK(fit.slope == doctest::Approx(2.0 / 3).epsilon(0.03 / (2.0 / 3)));
}

TEST_CASE("weyl counts") {
  const auto model = SurfaceModel::cp1(4);
  CHECK(weyl_prediction(model, 8, 16) == doctest::Approx(2.0));
  CHECK(weyl_prediction(model, 8, 23) == doctest::Approx(4.0));
  for (int k : {1024, 4096}) {
    CHECK(weyl_count(model, k, 8, 16) == 2);
    CHECK(weyl_count(model, k, 8, 23) == 4);
    CHECK(weyl_count(model, k, 1, 10) == 0);
  }
  // Endpoint on top of the r = 2 Landau level 2πk.
  CHECK_THROWS_AS(weyl_count(SurfaceModel::cp1(2), 16, 2 * kPi, 10), IllConditionedWindow);
  CHECK_THROWS_AS(weyl_prediction(SurfaceModel::cp1(2), 1, 2), UnsupportedError);
  const auto circle = SurfaceModel::circle(3, 2 * kPi);
  const double p = weyl_prediction(circle, 6, 20);
  const int k = 8192;
  CHECK(rel(weyl_count(circle, k, 6, 20) * std::pow(k, -1.0 / 3), p) < 0.05);
}

TEST_CASE("kodaira: zero modes and gap") {
  for (int k : {4, 16, 64}) {
    const auto s = kodaira_spectrum(SurfaceModel::cp1(2), k);
    CHECK(s.zero_modes == k + 1);
    CHECK(rel(s.first_positive, 4.0 * kPi * k + 8.0 * kPi) < 1e-5);
  }
  for (int r : {4, 6}) {
    for (int k : {16, 64}) CHECK(kodaira_spectrum(SurfaceModel::cp1(r), k).zero_modes == r * k / 2 + 1);
  }
  std::vector<double> scaled;
  for (int k : {128, 512, 2048}) {
    const auto s = kodaira_spectrum(SurfaceModel::cp1(4), k, false);
    CHECK(s.zero_modes == -1);
    CHECK(s.most_negative > -1e-6 * std::sqrt(k));
    scaled.push_back(s.first_positive / std::sqrt(k));
  }
  for (double v : scaled) CHECK(v > 0.5 * scaled[1]);
  CHECK_THROWS_AS(kodaira_spectrum(SurfaceModel::circle(3, 2 * kPi), 8), DomainError);
}

TEST_CASE("ground state concentrates at the poles") {
  const auto model = SurfaceModel::cp1(4);
  const auto a = ground_state_concentration(model, 512, 0.5);
  const auto b = ground_state_concentration(model, 4096, 0.5);
  CHECK(b.log_mass < a.log_mass - std::log(10.0));
  CHECK(a.mass > 0.0);
  CHECK(a.mass < 1e-6);
  double previous = 1.0;
  for (double rho : {0.2, 0.4, 0.6, 0.8}) {
    const double mass = ground_state_concentration(model, 256, rho).mass;
    CHECK(mass < previous);
    previous = mass;
  }
  CHECK(ground_state_concentration(model, 256, 0.05).mass > 0.5);
  CHECK_THROWS_AS(ground_state_concentration(SurfaceModel::cp1(2), 64, 0.5), UnsupportedError);
}

TEST_CASE("heat diagonal") {
  const auto model = SurfaceModel::cp1(4);
  const double B0 = jet_coefficient(model, Pole::north);
  const double target = model_heat_diag(4, B0, 1.0);
  double previous = 0.0;
  for (int k : {512, 2048, 8192}) {
    const auto h = heat_diag(model, k, 1.0, 0.0);
    CHECK(h.sectors == 1);
    const double ratio = h.value / std::sqrt(k) / target;
    CHECK(ratio > previous);
    CHECK(ratio < 1.0);
    previous = ratio;
  }
  // Both poles agree.
  CHECK(rel(heat_diag(model, 512, 1.0, kPi).value, heat_diag(model, 512, 1.0, 0.0).value) < 1e-6);
  // Short times: value·4π·(t/k^{1/2}) → 1 against the reference area.
  const int k = 64;
  double last = 0.0;
  for (double t : {1e-2, 2.5e-3}) {
    const double s = t / std::sqrt(k);
    last = heat_diag(model, k, t, 0.0).value * 4.0 * kPi * s;
  }
  CHECK(last == doctest::Approx(1.0).epsilon(0.02));
  // Away from the poles the diagonal decays faster than any power.
  double prev_log = 0.0;
  for (int kk : {128, 256, 512}) {
    const auto h = heat_diag(model, kk, 1.0, 0.5 * kPi);
    CHECK(h.log_error < 1e-2);
    const double scaled = h.log_value + 2.0 * std::log(kk);
    if (kk > 128) CHECK(scaled < prev_log);
    prev_log = scaled;
  }
  CHECK(prev_log < -100.0);
  CHECK_THROWS_AS(heat_diag(model, 16, -1.0, 0.0), DomainError);
}
