#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "semipos/errors.hpp"
#include "semipos/model_ops.hpp"
#include "semipos/numerics/quadrature.hpp"

using namespace semipos;
using std::numbers::pi;

namespace {

// Chebyshev–Gauss–Lobatto differentiation matrix on [-1, 1] (Trefethen).
Eigen::MatrixXd cheb_diff(int n, Eigen::VectorXd& x) {
  x.resize(n + 1);
  for (int i = 0; i <= n; ++i) x[i] = std::cos(pi * i / n);
  Eigen::VectorXd c(n + 1);
  for (int i = 0; i <= n; ++i) c[i] = ((i == 0 || i == n) ? 2.0 : 1.0) * ((i % 2) ? -1.0 : 1.0);
  Eigen::MatrixXd D(n + 1, n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) D(i, j) = i == j ? 0.0 : c[i] / c[j] / (x[i] - x[j]);
  for (int i = 0; i <= n; ++i) D(i, i) = -D.row(i).sum();
  return D;
}

// Smallest eigenvalue of −u″ − (s/x)u′ + V(x)u on [−L, L], u(±L) = 0, by
// collocation. s = 1 reproduces the m = 0 radial operator on even functions.
double collocation_ground(int n, double L, double s, const std::function<double(double)>& V) {
  Eigen::VectorXd x;
  Eigen::MatrixXd D = cheb_diff(n, x) / L;
  x *= L;
  Eigen::MatrixXd D2 = D * D;
  Eigen::MatrixXd A = -D2;
  for (int i = 0; i <= n; ++i) {
    A(i, i) += V(x[i]);
    if (s != 0.0) A.row(i) -= s / x[i] * D.row(i);
  }
  Eigen::MatrixXd inner = A.block(1, 1, n - 1, n - 1);
  Eigen::EigenSolver<Eigen::MatrixXd> es(inner, false);
  double best = INFINITY;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const auto ev = es.eigenvalues()[i];
    if (std::abs(ev.imag()) < 1e-8 && ev.real() < best) best = ev.real();
  }
  return best;
}

}  // namespace

TEST_CASE("model kernel diagonal closed forms") {
  CHECK(model_kernel_diag(2, 2 * pi) == doctest::Approx(1.0).epsilon(1e-14));
  for (double B0 : {0.5, 1.0, 7.0}) CHECK(model_kernel_diag(2, B0) == doctest::Approx(B0 / (2 * pi)).epsilon(1e-14));
  CHECK(model_kernel_diag(4, 2.0) == doctest::Approx(std::pow(pi, -1.5)).epsilon(1e-14));
  for (int r : {2, 4, 6, 8}) {
    CHECK(model_kernel_diag(r, 3.0) > 0.0);
    CHECK(model_kernel_diag_printed(r, 3.0) / model_kernel_diag(r, 3.0) ==
          doctest::Approx(std::pow(2.0, 2.0 / r)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(model_kernel_diag(3, 1.0), DomainError);
}

TEST_CASE("model basis norms against quadrature") {
  CHECK(model_basis_norm(2, 2.0, 0) == doctest::Approx(pi).epsilon(1e-14));
  CHECK(model_basis_norm(2, 2.0, 1) == doctest::Approx(pi).epsilon(1e-14));
  QuadratureSpec spec;
  spec.relative_tolerance = 1e-13;
  for (int r : {2, 4, 6}) {
    spec.substitution_exponent = r;
    for (double B0 : {2.0, 8 * pi * pi}) {
      const ModelOperator op{r, B0};
      for (int alpha : {0, 1, 3, 7}) {
        const double q = std::exp(integrate_radial_log(
            [&](double x) { return std::log(2 * pi) + (2 * alpha + 1) * x - op.weight(std::exp(x)); }, spec));
        CHECK(std::abs(q / model_basis_norm(r, B0, alpha) - 1.0) < 1e-10);
      }
      if (r % 2 == 0) CHECK(model_kernel_diag(r, B0) == doctest::Approx(1.0 / model_basis_norm(r, B0, 0)).epsilon(1e-14));
    }
  }
}

TEST_CASE("weight recovers the field") {
  for (int r : {2, 3, 4, 6}) {
    const ModelOperator op{r, 2.5};
    for (double rho : {0.3, 0.8, 1.4}) {
      const double h = 1e-4;
      const double w1 = (op.weight(rho + h) - op.weight(rho - h)) / (2 * h);
      const double w2 = (op.weight(rho + h) - 2 * op.weight(rho) + op.weight(rho - h)) / (h * h);
      CHECK(0.5 * (w2 + w1 / rho) == doctest::Approx(op.field(rho)).epsilon(1e-7));
    }
  }
}

TEST_CASE("Landau levels at r = 2") {
  for (double B0 : {1.0, 2 * pi, 5.0}) {
    const auto l0 = model_bochner_lambda0(2, B0);
    CHECK(std::abs(l0.value / B0 - 1.0) < 1e-6);
  }
  const auto ev = model_sector_eigenvalues(ModelOperator{2, 1.0}, 0, 3);
  CHECK(ev.values[1] == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(ev.values[2] == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(model_sector_eigenvalues(ModelOperator{2, 1.0}, -1, 1).values[0] == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("quartic model ground energy: finite differences versus collocation") {
  const auto l0 = model_bochner_lambda0(4, 1.0);
  CHECK(l0.sector == 0);
  const double colloc = collocation_ground(97, 6.0, 1.0, [](double x) { return std::pow(x, 6) / 16.0; });
  CHECK(std::abs(l0.value - colloc) < 1e-6 * colloc);
  // Frozen after the agreement above.
  CHECK(l0.value == doctest::Approx(1.3046942316).epsilon(1e-9));
}

TEST_CASE("sector ground energies are unimodal in m") {
  const ModelOperator op{4, 1.0};
  double prev = model_sector_eigenvalues(op, 0, 1).values[0];
  for (int m = 1; m <= 12; ++m) {
    const double v = model_sector_eigenvalues(op, m, 1).values[0];
    CHECK(v > prev);
    prev = v;
  }
  prev = model_sector_eigenvalues(op, 0, 1).values[0];
  for (int m = -1; m >= -6; --m) {
    const double v = model_sector_eigenvalues(op, m, 1).values[0];
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("dilation covariance") {
  const double base4 = model_bochner_lambda0(4, 1.0).value;
  for (double B0 : {3.0, 8 * pi * pi}) {
    CHECK(std::abs(model_bochner_lambda0(4, B0).value / (std::sqrt(B0) * base4) - 1.0) < 1e-8);
  }
  const double base6 = model_bochner_lambda0(6, 1.0).value;
  CHECK(std::abs(model_bochner_lambda0(6, 5.0).value / (std::pow(5.0, 1.0 / 3) * base6) - 1.0) < 1e-8);
}

TEST_CASE("model counting") {
  const double l0 = model_bochner_lambda0(4, 1.0).value;
  CHECK(model_counting(4, 1.0, 0.1, 0.9 * l0) == 0);
  CHECK(model_counting(4, 1.0, 1.0, 2.0) == 1);
  CHECK(model_counting(4, 1.0, 1.0, 5.0) == 8);
  CHECK_THROWS_AS(model_counting(2, 1.0, 0.5, 1.5), UnsupportedError);
  CHECK_THROWS_AS(model_counting(4, 1.0, l0 * (1 + 1e-5), 5.0), IllConditionedWindow);
}

TEST_CASE("Montgomery family") {
  CHECK(montgomery_lambda0(2, 3.0) == doctest::Approx(3.0).epsilon(1e-7));
  double eta = 0.0;
  const double m3 = montgomery_lambda0(3, 1.0, {}, &eta);
  const double colloc = collocation_ground(
      121, 8.0, 0.0, [eta](double x) { return (eta - 0.5 * x * x) * (eta - 0.5 * x * x); });
  CHECK(std::abs(m3 - colloc) < 1e-4);
  CHECK(m3 == doctest::Approx(0.5698203).epsilon(1e-6));
  for (double c : {0.2, 5.0, 22.0}) {
    CHECK(std::abs(montgomery_lambda0(3, c) / (std::pow(c, 2.0 / 3) * m3) - 1.0) < 1e-8);
  }
  CHECK(montgomery_count_below(3, 1.0, eta, 0.5) == 0);
  CHECK(montgomery_count_below(3, 1.0, eta, 0.6) == 1);
  CHECK(montgomery_integrated_count(3, 1.0, 0.0, 0.5) == 0.0);
  CHECK(montgomery_integrated_count(3, 1.0, 0.0, 3.0) > 0.0);
  CHECK_THROWS_AS(montgomery_integrated_count(2, 1.0, 0.0, 3.0), UnsupportedError);
  // Scaling of the integrated count: ∫#(η; c, E) dη = c^{1/r}·∫#(η; 1, E c^{−2/r}) dη.
  const double c = 4.0;
  CHECK(montgomery_integrated_count(3, c, 0.0, 3.0 * std::pow(c, 2.0 / 3)) ==
        doctest::Approx(std::pow(c, 1.0 / 3) * montgomery_integrated_count(3, 1.0, 0.0, 3.0)).epsilon(1e-6));
}

TEST_CASE("model heat diagonal") {
  for (double B0 : {1.0, 3.0}) {
    for (double t : {0.5, 2.0}) {
      CHECK(std::abs(model_heat_diag(2, B0, t) / mehler_heat_diag(B0, t) - 1.0) < 1e-8);
    }
  }
  CHECK_THROWS_AS(model_heat_diag(4, 1.0, 0.0), DomainError);
  const double l0 = model_bochner_lambda0(4, 1.0).value;
  const double slope = std::log(model_heat_diag(4, 1.0, 14.0) / model_heat_diag(4, 1.0, 10.0)) / 4.0;
  CHECK(slope == doctest::Approx(-l0).epsilon(1e-3));
  const double short1 = 4 * pi * 0.2 * model_heat_diag(4, 1.0, 0.2);
  const double short2 = 4 * pi * 0.05 * model_heat_diag(4, 1.0, 0.05);
  CHECK(std::abs(short2 - 1.0) < 1e-2);
  CHECK(std::abs(short2 - 1.0) < std::abs(short1 - 1.0));
}

TEST_CASE("large-time heat ratio reaches the bottom of the spectrum") {
  const auto probe = large_time_heat_probe(4, 1.0, 0.05);
  CHECK(probe.satisfied);
  CHECK(probe.ratio >= probe.lambda0 - 1e-8);
  CHECK(probe.ratio <= probe.lambda0 + 0.05);
}
