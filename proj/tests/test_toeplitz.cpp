#include <cmath>
#include <numbers>

#include "doctest.h"
#include "semipos/errors.hpp"
#include "semipos/numerics/special.hpp"
#include "semipos/numerics/stats.hpp"
#include "semipos/toeplitz.hpp"

using namespace semipos;

namespace {

double identity_error(const ToeplitzMatrix& t) {
  const auto n = t.matrix.rows();
  return (t.matrix - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("symbols: parsing, products and sup norms") {
  const auto fs = Symbol::parse("fs_height");
  CHECK(fs.is_radial());
  CHECK(fs.radial_value(1.0) == doctest::Approx(0.5));
  CHECK(fs.sup_norm() == doctest::Approx(1.0).epsilon(1e-12));
  const auto bump = Symbol::parse("bump=1,0.3");
  CHECK(bump.sup_norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(Symbol::parse("step_smooth=1,0.2").radial_value(1.0) == doctest::Approx(0.5));
  const auto g = Symbol::parse("one;1:0.5");
  CHECK(g.bandwidth() == 1);
  CHECK(g.fourier(-1) == std::complex<double>(0.5));
  CHECK(g.fourier(0) == std::complex<double>(0.0));
  // |cos θ| peaks at 1.
  CHECK(g.sup_norm() == doctest::Approx(1.0).epsilon(1e-10));
  const auto gg = g * g;
  CHECK(gg.bandwidth() == 2);
  CHECK(gg.fourier(0) == std::complex<double>(0.5));
  CHECK((fs * fs).radial_value(1.0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(Symbol::parse("mystery"), DomainError);
  CHECK_THROWS_AS(Symbol::parse("bump=1"), DomainError);
  CHECK_THROWS_AS(Symbol::parse("one;5:1"), DomainError);
  CHECK_THROWS_AS(Symbol::parse("one;-1:1"), DomainError);
}

TEST_CASE("assembly: identity, r = 2 closed form, band structure") {
  for (int r : {2, 4, 6}) {
    for (auto m : {MeasureTag::omega_r, MeasureTag::round})
      CHECK(identity_error(assemble_toeplitz(SurfaceModel::cp1(r), 24, Symbol::parse("one"), m)) < 1e-12);
  }
  const auto fs = Symbol::parse("fs_height");
  for (int k : {8, 40, 200}) {
    const auto t = assemble_toeplitz(SurfaceModel::cp1(2), k, fs);
    for (int a = 0; a <= k; ++a) {
      // B(α+2, k+1−α)/B(α+1, k+1−α) = (α+1)/(k+2).
      CHECK(std::abs(t.matrix(a, a).real() - (a + 1.0) / (k + 2.0)) < 1e-10);
    }
    CHECK(t.matrix.imag().cwiseAbs().maxCoeff() == 0.0);
  }
  const auto cosbump = Symbol::parse("bump=1,0.5;1:0.5");
  const auto t = assemble_toeplitz(SurfaceModel::cp1(4), 20, cosbump);
  CHECK(t.bandwidth == 1);
  CHECK((t.matrix - t.matrix.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  for (int i = 0; i < t.matrix.rows(); ++i)
    for (int j = 0; j < t.matrix.cols(); ++j)
      if (std::abs(i - j) != 1) CHECK(std::abs(t.matrix(i, j)) == 0.0);
  CHECK(std::abs(t.matrix(3, 4)) > 0.0);
}

TEST_CASE("norm law") {
  const auto fs = Symbol::parse("fs_height");
  for (int k : {16, 256, 1024}) CHECK(toeplitz_norm(SurfaceModel::cp1(2), k, fs) == doctest::Approx((k + 1.0) / (k + 2.0)).epsilon(1e-12));
  CHECK(toeplitz_norm(SurfaceModel::cp1(4), 30, Symbol::parse("one;0:-2.5")) == doctest::Approx(2.5).epsilon(1e-12));
  // r = 4: the top state sits at t ~ k^{1/4}, so 1 − ‖T‖ decays like k^{−1/2}.
  std::vector<double> ks, gaps;
  double previous = 0.0;
  for (int k : {32, 64, 128, 256, 512}) {
    const double n = toeplitz_norm(SurfaceModel::cp1(4), k, fs);
    CHECK(n > previous);
    CHECK(n <= 1.0 + 1e-10);
    previous = n;
    ks.push_back(k);
    gaps.push_back(1.0 - n);
  }
  CHECK(fit_scaling(ks, gaps).slope == doctest::Approx(-0.5).epsilon(0.1));
  // ‖T‖ ≤ ‖f‖_∞ for non-radial symbols too.
  for (const char* s : {"bump=1,0.5;1:0.3:0.1;2:0.2", "step_smooth=1,0.3;0:0.5;3:0.25", "fs_height;0:1;1:0.5"}) {
    const auto f = Symbol::parse(s);
    for (auto m : {MeasureTag::omega_r, MeasureTag::round}) CHECK(toeplitz_norm(SurfaceModel::cp1(4), 24, f, m) <= f.sup_norm() + 1e-10);
  }
}

TEST_CASE("composition defect") {
  const auto one = Symbol::parse("one");
  const auto fs = Symbol::parse("fs_height");
  CHECK(composition_defect(SurfaceModel::cp1(4), 16, one, one) < 1e-12);
  for (int k : {16, 64, 256}) {
    double expected = 0.0;
    for (int a = 0; a <= k; ++a)
      expected = std::max(expected, std::abs((a + 1.0) * (a + 2.0) / ((k + 2.0) * (k + 3.0)) -
                                             (a + 1.0) * (a + 1.0) / ((k + 2.0) * (k + 2.0))));
    const double d = composition_defect(SurfaceModel::cp1(2), k, fs, fs);
    CHECK(d == doctest::Approx(expected).epsilon(1e-8));
    CHECK(d * k < 1.0);
  }
  std::vector<double> ks, ds;
  for (int k : {32, 64, 128, 256, 512}) {
    ks.push_back(k);
    ds.push_back(composition_defect(SurfaceModel::cp1(4), k, fs, fs));
  }
  CHECK(fit_scaling(ks, ds).slope <= -0.25 + 0.05);
  // Non-radial symbols go through the dense path.
  const auto g = Symbol::parse("bump=1,0.5;1:0.5");
  const double d1 = composition_defect(SurfaceModel::cp1(4), 16, g, g);
  const double d2 = composition_defect(SurfaceModel::cp1(4), 64, g, g);
  CHECK(d2 < d1);
}

TEST_CASE("szego limit") {
  const auto fs = Symbol::parse("fs_height");
  // Under ω̄₂ the mass of {|z| ≤ s} is s²/(1+s²) = f(s): the pushforward is uniform.
  for (double y : {0.1, 0.5, 0.9}) CHECK(pushforward_cdf(SurfaceModel::cp1(2), fs, y) == doctest::Approx(y).epsilon(1e-12));
  // r = 4: y ↦ y²/(y² + (1−y)²).
  for (double y : {0.2, 0.7}) CHECK(pushforward_cdf(SurfaceModel::cp1(4), fs, y) == doctest::Approx(y * y / (y * y + (1 - y) * (1 - y))).epsilon(1e-12));
  const auto s2 = szego_measure(SurfaceModel::cp1(2), 256, fs);
  CHECK(s2.ks < 0.01);
  CHECK(s2.ks * 256 < 2.0);
  CHECK(szego_measure(SurfaceModel::cp1(4), 512, fs).ks < 0.02);
  const auto c = szego_measure(SurfaceModel::cp1(4), 64, Symbol::parse("one;0:0.3"));
  CHECK(c.ks < 1e-12);
  CHECK_THROWS_AS(szego_measure(SurfaceModel::cp1(4), 16, Symbol::parse("one;1:0.5")), UnsupportedError);
}

TEST_CASE("diagonal ratio and trace law") {
  const auto fs = Symbol::parse("fs_height");
  const auto m4 = SurfaceModel::cp1(4);
  CHECK(toeplitz_diag_ratio(m4, 128, Symbol::parse("one"), 0.7) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(toeplitz_diag_ratio(m4, 2048, fs, 0.0) < 0.02);
  CHECK(toeplitz_diag_ratio(m4, 2048, fs, 1.0) == doctest::Approx(0.5).epsilon(0.02));
  CHECK(toeplitz_diag_ratio(m4, 256, fs, INFINITY) > 0.9);
  CHECK(curvature_integral(m4, fs) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(curvature_integral(SurfaceModel::cp1(2), fs) == doctest::Approx(0.5).epsilon(1e-10));
  for (int r : {2, 4}) {
    const auto model = SurfaceModel::cp1(r);
    const auto t = assemble_toeplitz(model, 1024, fs);
    CHECK(t.matrix.trace().real() / 1024 == doctest::Approx(curvature_integral(model, fs)).epsilon(0.02));
  }
}
