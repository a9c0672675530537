#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "semipos/errors.hpp"
#include "semipos/numerics/hermitian.hpp"
#include "semipos/numerics/quadrature.hpp"
#include "semipos/numerics/rng.hpp"
#include "semipos/numerics/roots.hpp"
#include "semipos/numerics/special.hpp"
#include "semipos/numerics/stats.hpp"
#include "semipos/numerics/tridiag.hpp"

using namespace semipos;
using std::numbers::pi;

namespace {

// Greedy nearest-neighbour matching distance between two root multisets.
double multiset_distance(std::vector<cplx> a, std::vector<cplx> b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (const cplx& z : a) {
    auto it = std::min_element(b.begin(), b.end(),
                               [&](const cplx& u, const cplx& v) { return std::abs(u - z) < std::abs(v - z); });
    worst = std::max(worst, std::abs(*it - z));
    b.erase(it);
  }
  return worst;
}

double log1p_exp(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

TEST_CASE("log_gamma closed values and quadrature oracle") {
  CHECK(log_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(log_gamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-14));
  CHECK(log_gamma(0.5) == doctest::Approx(0.5 * std::log(pi)).epsilon(1e-14));
  QuadratureSpec spec;
  spec.relative_tolerance = 1e-14;
  for (double x : {0.5, 1.25, 3.0, 7.5}) {
    const double lq = integrate_radial_log([x](double u) { return (x - 1.0) * u - std::exp(u); }, spec);
    CHECK(std::abs(lq - log_gamma(x)) < 1e-13 * std::max(1.0, std::abs(log_gamma(x))));
    if (x < 4) {
      const double q = integrate_radial([x](double t) { return std::pow(t, x - 1.0) * std::exp(-t); }, spec);
      CHECK(std::abs(std::log(q) - log_gamma(x)) < 1e-13 * std::max(1.0, std::abs(log_gamma(x))));
    }
  }
  CHECK_THROWS_AS(log_gamma(0.0), DomainError);
  CHECK_THROWS_AS(log_gamma(-1.0), DomainError);
}

TEST_CASE("integrate_radial reference integrals") {
  CHECK(integrate_radial([](double t) { return 2 * t / ((1 + t * t) * (1 + t * t)); }) ==
        doctest::Approx(1.0).epsilon(1e-12));
  QuadratureSpec s4;
  s4.substitution_exponent = 4;
  CHECK(integrate_radial([](double t) { return t * std::exp(-std::pow(t, 4)); }, s4) ==
        doctest::Approx(std::sqrt(pi) / 4).epsilon(1e-11));
}

TEST_CASE("Beta-reducible family matches closed form for r in {2,4,6}, k <= 200") {
  for (int r : {2, 4, 6}) {
    for (int k : {1, 8, 57, 200}) {
      const int D = r * k / 2;
      QuadratureSpec spec;
      spec.substitution_exponent = r;
      spec.relative_tolerance = 1e-12;
      spec.log_range = 700.0 / r;
      double worst = 0.0;
      for (int alpha = 0; alpha <= D; ++alpha) {
        auto log_f = [&](double x) { return (2.0 * alpha + r - 1) * x - (k + 2) * log1p_exp(r * x); };
        const double q = integrate_radial_log(log_f, spec);
        const double closed = log_beta(2.0 * alpha / r + 1, k + 1 - 2.0 * alpha / r) - std::log(r);
        worst = std::max(worst, std::abs(std::expm1(q - closed)));
      }
      CHECK(worst < 1e-9);
    }
  }
}

TEST_CASE("integrate_interval and integrate_log_peaked") {
  CHECK(integrate_interval([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0) ==
        doctest::Approx(2.0).epsilon(1e-10));
  CHECK(integrate_interval([](double x) { return std::sin(x); }, 0.0, pi) == doctest::Approx(2.0).epsilon(1e-12));
  // Gaussian with tiny width and huge offset in log space.
  const double sigma = 1e-3;
  const double lp = integrate_log_peaked([&](double x) { return 500.0 - 0.5 * (x - 3) * (x - 3) / (sigma * sigma); },
                                         3.0, sigma);
  CHECK(lp == doctest::Approx(500.0 + std::log(sigma * std::sqrt(2 * pi))).epsilon(1e-13));
}

TEST_CASE("quadrature spec validation and node cap") {
  QuadratureSpec bad;
  bad.node_count = 4;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = {};
  bad.relative_tolerance = 1e-3;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  QuadratureSpec tight;
  tight.max_node_count = 64;
  tight.relative_tolerance = 1e-14;
  CHECK_THROWS_AS(integrate_radial([](double t) { return std::exp(-(t - 5) * (t - 5) * 1e6); }, tight),
                  ConvergenceError);
}

TEST_CASE("tridiagonal closed forms") {
  SymmetricTridiagonal one({3.0}, {});
  CHECK(tridiag_eigenvalues(one, EigenSelection::lowest(1))[0] == doctest::Approx(3.0));
  SymmetricTridiagonal three({2, 2, 2}, {-1, -1});
  const auto v = tridiag_eigenvalues(three, EigenSelection::lowest(3));
  CHECK(v[0] == doctest::Approx(2 - std::sqrt(2.0)).epsilon(1e-15));
  CHECK(v[1] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(v[2] == doctest::Approx(2 + std::sqrt(2.0)).epsilon(1e-15));
  // Discrete Dirichlet Laplacian of size 200.
  const int n = 200;
  SymmetricTridiagonal lap(std::vector<double>(n, 2.0), std::vector<double>(n - 1, -1.0));
  const auto w = tridiag_eigenvalues(lap, EigenSelection::lowest(n));
  for (int j = 0; j < n; ++j) CHECK(std::abs(w[j] - (2 - 2 * std::cos((j + 1) * pi / (n + 1)))) < 1e-13);
}

TEST_CASE("tridiagonal Sturm count, weights and residuals") {
  SplitMix64 g(7);
  const int n = 300;
  std::vector<double> d(n), e(n - 1), wt(n);
  for (auto& x : d) x = 10 * g.uniform() - 5;
  for (auto& x : e) x = 2 * g.uniform() - 1;
  for (auto& x : wt) x = 0.1 + g.uniform();
  SymmetricTridiagonal op(d, e, wt);
  const auto all = tridiag_eigen(op, EigenSelection::lowest(n));
  for (double x : {-3.0, -0.5, 0.0, 1.7, 4.2}) {
    const long below = std::count_if(all.values.begin(), all.values.end(), [x](double l) { return l < x; });
    CHECK(below == op.count_below(x));
    const auto win = tridiag_eigenvalues(op, EigenSelection::window(-1e9, x));
    CHECK(static_cast<long>(win.size()) == below);
  }
  CHECK(std::is_sorted(all.values.begin(), all.values.end()));
  double worst_res = 0.0, worst_orth = 0.0;
  for (int j = 0; j < n; ++j) {
    const auto Av = op.apply(all.vectors[j]);
    double res = 0.0, nrm = 0.0;
    for (int i = 0; i < n; ++i) {
      res += wt[i] * (Av[i] - all.values[j] * all.vectors[j][i]) * (Av[i] - all.values[j] * all.vectors[j][i]);
      nrm += wt[i] * all.vectors[j][i] * all.vectors[j][i];
    }
    worst_res = std::max(worst_res, std::sqrt(res / nrm) / op.norm());
    if (j > 0) {
      double dot = 0.0;
      for (int i = 0; i < n; ++i) dot += wt[i] * all.vectors[j][i] * all.vectors[j - 1][i];
      worst_orth = std::max(worst_orth, std::abs(dot));
    }
    CHECK(nrm == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(worst_res < 1e-10);
  CHECK(worst_orth < 1e-8);
}

TEST_CASE("tridiagonal contract") {
  CHECK_THROWS_AS(SymmetricTridiagonal::from_operator({1.0}, {0.0, 0.0}, {2.0}, {1.0, 1.0}), ContractError);
  const auto ok = SymmetricTridiagonal::from_operator({2.0}, {1.0, 1.0}, {1.0}, {2.0, 1.0});
  CHECK(ok.offdiagonal()[0] == doctest::Approx(2.0));
  CHECK_THROWS_AS(SymmetricTridiagonal({1.0, 2.0}, {1.0}, {1.0, -1.0}), ContractError);
}

TEST_CASE("tridiagonal log-form eigenvectors survive underflow") {
  // Harmonic oscillator −u'' + x²·10⁴ u on a wide box: the ground state decays like exp(−50x²).
  const int n = 2000;
  const double L = 10.0, h = 2 * L / (n + 1);
  std::vector<double> d(n), e(n - 1, -1.0 / (h * h));
  for (int i = 0; i < n; ++i) {
    const double x = -L + (i + 1) * h;
    d[i] = 2.0 / (h * h) + 1e4 * x * x;
  }
  SymmetricTridiagonal op(d, e);
  const auto eig = tridiag_eigen(op, EigenSelection::lowest(1));
  CHECK(eig.values[0] == doctest::Approx(100.0).epsilon(1e-3));
  // At x = 8 the Gaussian exp(−50x²) = e^{−3200} underflows but the log survives.
  const int i8 = static_cast<int>(std::lround((8.0 + L) / h)) - 1;
  CHECK(eig.vectors[0][i8] == 0.0);
  CHECK(std::isfinite(eig.log_abs[0][i8]));
  // The discrete tail decays by the root q of q + 1/q = 2 + h²V per node,
  // slower than the continuum Gaussian but still far below the double range.
  CHECK(eig.log_abs[0][i8] < -1500.0);
  const int i7 = static_cast<int>(std::lround((7.0 + L) / h)) - 1;
  CHECK(eig.log_abs[0][i8] < eig.log_abs[0][i7]);
}

namespace {

// Characteristic polynomial coefficients (ascending) by Faddeev–LeVerrier.
std::vector<cplx> char_poly(const Eigen::MatrixXcd& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<cplx> c(n + 1);
  c[n] = 1.0;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 1; k <= n; ++k) {
    m = a * m + c[n - k + 1] * Eigen::MatrixXcd::Identity(n, n);
    c[n - k] = -(a * m).trace() / static_cast<double>(k);
  }
  return c;
}

}  // namespace

TEST_CASE("hermitian_eigen") {
  const auto id = hermitian_eigen(Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(5, 5)));
  for (double v : id) CHECK(v == doctest::Approx(1.0));
  Eigen::MatrixXd dg = Eigen::MatrixXd::Zero(3, 3);
  dg(0, 0) = 3;
  dg(1, 1) = 1;
  dg(2, 2) = 2;
  const auto dv = hermitian_eigen(dg);
  CHECK(dv == std::vector<double>{1, 2, 3});
  SplitMix64 g(11);
  Eigen::MatrixXcd a(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) a(i, j) = cplx(g.uniform() - 0.5, g.uniform() - 0.5);
  a = (a + a.adjoint()).eval();
  const auto values = hermitian_eigen(a);
  auto roots = poly_roots(char_poly(a));
  std::vector<double> re;
  for (const cplx& z : roots) {
    CHECK(std::abs(z.imag()) < 1e-7);
    re.push_back(z.real());
  }
  std::sort(re.begin(), re.end());
  double trace = 0.0, frob = 0.0;
  for (int i = 0; i < 8; ++i) {
    CHECK(values[i] == doctest::Approx(re[i]).epsilon(1e-8));
    trace += values[i];
    frob += values[i] * values[i];
  }
  CHECK(trace == doctest::Approx(a.trace().real()).epsilon(1e-10));
  CHECK(frob == doctest::Approx(a.squaredNorm()).epsilon(1e-10));
  Eigen::MatrixXcd bad = a;
  bad(0, 1) += 1e-6;
  CHECK_THROWS_AS(hermitian_eigen(bad), ContractError);
}

TEST_CASE("poly_roots small cases") {
  auto r2 = poly_roots({-1.0, 0.0, 1.0});
  CHECK(multiset_distance(r2, {1.0, -1.0}) < 1e-14);
  std::vector<cplx> c8(9, 0.0);
  c8[0] = -1.0;
  c8[8] = 1.0;
  std::vector<cplx> unity;
  for (int j = 0; j < 8; ++j) unity.push_back(std::polar(1.0, 2 * pi * j / 8));
  CHECK(multiset_distance(poly_roots(c8), unity) < 1e-13);
  CHECK_THROWS_AS(poly_roots({1.0, 2.0, 0.0}), DegreeError);
  // Exact zero constant term deflates to a root at the origin.
  auto r0 = poly_roots({0.0, -2.0, 1.0});
  CHECK(multiset_distance(r0, {0.0, 2.0}) < 1e-14);
}

TEST_CASE("poly_roots random degree 50 against companion matrix") {
  const auto c = sample_complex_gaussians(2024, 51);
  const auto roots = poly_roots(c);
  CHECK(roots.size() == 50);
  CHECK(multiset_distance(roots, companion_roots(c)) < 1e-6);
  cplx sum = 0.0;
  for (const cplx& z : roots) sum += z;
  CHECK(std::abs(sum + c[49] / c[50]) < 1e-6 * std::abs(c[49] / c[50]));
}

TEST_CASE("poly_roots high degree with huge dynamic range") {
  // Weighted Kac-type polynomial of degree 1024 with binomial weights.
  const int D = 1024;
  const auto g = sample_complex_gaussians(5, D + 1);
  std::vector<cplx> c(D + 1);
  for (int j = 0; j <= D; ++j) c[j] = g[j] * std::exp(0.5 * log_binomial(D, j) - 0.5 * log_binomial(D, D / 2));
  const auto roots = poly_roots(c);
  CHECK(roots.size() == static_cast<std::size_t>(D));
  double worst = 0.0;
  cplx sum = 0.0;
  for (const cplx& z : roots) {
    worst = std::max(worst, root_residual(c, z));
    sum += z;
  }
  CHECK(worst < 1e-8);
  CHECK(std::abs(sum + c[D - 1] / c[D]) < 1e-6 * std::max(1.0, std::abs(c[D - 1] / c[D])));
}

TEST_CASE("complex Gaussian sampler") {
  const auto a = sample_complex_gaussians(42, 100);
  const auto b = sample_complex_gaussians(42, 100);
  CHECK(a == b);
  CHECK(sample_complex_gaussians(43, 1)[0] != a[0]);
  const auto big = sample_complex_gaussians(1, 1000000);
  double m2 = 0.0;
  for (const auto& z : big) m2 += std::norm(z);
  m2 /= big.size();
  CHECK(std::abs(m2 - 1.0) < 3e-3 * std::sqrt(2.0));
  CHECK(mix_seed(1, 0) != mix_seed(1, 1));
  CHECK(mix_seed(1, 0) != mix_seed(2, 0));
}

TEST_CASE("KS distance and fits") {
  std::vector<double> u;
  for (int i = 0; i < 1000; ++i) u.push_back((i + 0.5) / 1000);
  CHECK(ks_distance(u, [](double x) { return x; }) == doctest::Approx(0.0005).epsilon(1e-9));
  // Point mass at 0.3 against a sample sitting exactly on the atom.
  auto atom = [](double x) { return x >= 0.3 ? 1.0 : 0.0; };
  auto atom_left = [](double x) { return x > 0.3 ? 1.0 : 0.0; };
  CHECK(ks_distance({0.3, 0.3, 0.3}, atom, atom_left) == 0.0);

  std::vector<double> ks, vals, synth;
  for (int j = 10; j <= 14; ++j) {
    const double k = std::ldexp(1.0, j);
    ks.push_back(k);
    vals.push_back(k + 1);
  }
  const auto fit = fit_scaling(ks, vals);
  CHECK(fit.slope == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(fit.expansion_exponent == doctest::Approx(1.0).epsilon(1e-6));
  ks.clear();
  for (int j = 5; j <= 13; ++j) {
    const double k = std::ldexp(1.0, j);
    ks.push_back(k);
    synth.push_back(3.0 * std::sqrt(k) + 1.5);
  }
  const auto fs = fit_scaling(ks, synth);
  CHECK(fs.expansion_exponent == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(fs.expansion_offset == doctest::Approx(1.5).epsilon(1e-5));
  CHECK(fs.slope < 0.49);
  CHECK_THROWS_AS(fit_scaling({1, 2, 4, 8}, {1, 2, 3, 4}), SampleError);
}
