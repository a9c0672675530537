#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "semipos/errors.hpp"
#include "semipos/numerics/roots.hpp"
#include "semipos/random_sections.hpp"

using namespace semipos;

namespace {

RandomEnsemble ensemble(int r, int k, BasisRange range, int trials, std::uint64_t seed = 2024) {
  return RandomEnsemble{SurfaceModel::cp1(r), k, range, seed, trials};
}

}  // namespace

TEST_CASE("sampling is deterministic and sized by the basis range") {
  const auto e = ensemble(4, 20, BasisRange::full, 10);
  CHECK(e.degree() == 40);
  CHECK(ensemble(4, 20, BasisRange::literal, 10).degree() == 20);
  const auto a = sample_section(e, 3);
  const auto b = sample_section(e, 3);
  CHECK(a.size() == 41);
  CHECK(a == b);
  CHECK(sample_section(e, 4) != a);
  auto other = e;
  other.seed = 2025;
  CHECK(sample_section(other, 3) != a);
  CHECK(sample_zeros(e, 3).size() == 40);
  CHECK(basis_range_from_string("literal") == BasisRange::literal);
  CHECK(to_string(BasisRange::full) == "full");
  CHECK_THROWS_AS(basis_range_from_string("half"), DomainError);
  CHECK_THROWS_AS(sample_section(e, -1), DomainError);
  CHECK_THROWS_AS(sample_section(RandomEnsemble{SurfaceModel::circle(3, 2 * std::numbers::pi), 8}, 0), DomainError);
}

TEST_CASE("zeros do not see a global phase") {
  const auto c = sample_section(ensemble(2, 30, BasisRange::full, 10), 0);
  auto rotated = c;
  for (auto& x : rotated) x *= std::polar(1.0, 0.7);
  auto za = poly_roots(c), zb = poly_roots(rotated);
  for (const auto& z : za) {
    double best = INFINITY;
    for (const auto& w : zb) best = std::min(best, std::abs(z - w));
    CHECK(best < 1e-8 * std::max(1.0, std::abs(z)));
  }
}

TEST_CASE("variance audit against the Bergman kernel") {
  // r = 2: the kernel is k + 1 everywhere.
  for (double t : {0.3, 1.0, 2.5}) {
    const auto v = variance_audit(ensemble(2, 12, BasisRange::full, 10000, 17), t);
    CHECK(v.kernel == doctest::Approx(13.0).epsilon(1e-12));
    CHECK(std::abs(v.mean - v.kernel) < 3.0 * v.standard_error);
  }
  for (double t : {0.2, 0.8, 1.6}) {
    const auto v = variance_audit(ensemble(4, 16, BasisRange::full, 10000, 9), t);
    CHECK(std::abs(v.mean - v.kernel) < 3.0 * v.standard_error);
  }
}

TEST_CASE("radial and angular equidistribution") {
  const auto s2 = zero_statistics(ensemble(2, 512, BasisRange::full, 50));
  CHECK(s2.degree == 512);
  CHECK(s2.failures == 0);
  CHECK(s2.radial_ks < 0.02);
  CHECK(s2.angular_ks < 0.02);
  CHECK(s2.median_modulus == doctest::Approx(1.0).epsilon(0.01));
  // Full range at r = 2 coincides with the literal one.
  CHECK(zero_statistics(ensemble(2, 64, BasisRange::literal, 10)).radial_ks ==
        zero_statistics(ensemble(2, 64, BasisRange::full, 10)).radial_ks);
  const auto s4 = zero_statistics(ensemble(4, 256, BasisRange::full, 50));
  CHECK(s4.degree == 512);
  CHECK(s4.radial_ks < 0.02);
  CHECK(s4.angular_ks < 0.02);
  CHECK_THROWS_AS(zero_statistics(ensemble(2, 16, BasisRange::full, 5)), SampleError);
}

TEST_CASE("literal truncation leaves a gap that does not close") {
  double previous = 0.0;
  for (int k : {64, 256}) {
    const auto s = zero_statistics(ensemble(4, k, BasisRange::literal, 30));
    // Degree-k polynomials put their zeros where the finite-k kernel says, not on ω̄₄.
    CHECK(s.radial_ks > 0.4);
    CHECK(s.radial_ks > previous - 0.02);
    CHECK(s.radial_ks_expected < 0.1);
    previous = s.radial_ks;
  }
}

TEST_CASE("radial distance shrinks when the degree doubles") {
  for (int r : {2, 4}) {
    const double d1 = zero_statistics(ensemble(r, 128 * 2 / r, BasisRange::full, 30)).radial_ks;
    const double d2 = zero_statistics(ensemble(r, 256 * 2 / r, BasisRange::full, 30)).radial_ks;
    CHECK(d2 <= 0.8 * d1);
  }
}

TEST_CASE("expected zero counts") {
  const auto whole = expected_zero_density_check(ensemble(4, 24, BasisRange::full, 100), 0.0, INFINITY);
  CHECK(whole.mean_count == 48.0);
  CHECK(whole.limit_count == doctest::Approx(48.0));
  CHECK(whole.expected_count == doctest::Approx(48.0));
  const auto annulus = expected_zero_density_check(ensemble(2, 64, BasisRange::full, 400, 7), 0.5, 2.0);
  CHECK(std::abs(annulus.mean_count - annulus.limit_count) < 3.0 * annulus.standard_error);
  // Near the r = 4 pole ω₄ vanishes, so zeros are scarce there.
  const auto pole = expected_zero_density_check(ensemble(4, 64, BasisRange::full, 400, 7), 0.0, 0.4);
  CHECK(std::abs(pole.mean_count - pole.expected_count) < 3.0 * pole.standard_error);
  CHECK(pole.mean_count / 128.0 < 0.4 * 0.4);
  CHECK_THROWS_AS(expected_zero_density_check(ensemble(2, 8, BasisRange::full, 50), 0.0, 1.0), SampleError);
  CHECK_THROWS_AS(expected_zero_density_check(ensemble(2, 8, BasisRange::full, 100), 1.0, 0.5), DomainError);
}

TEST_CASE("statistics are reproducible") {
  const auto e = ensemble(4, 64, BasisRange::full, 12, 99);
  const auto a = zero_statistics(e);
  const auto b = zero_statistics(e);
  CHECK(a.radial_ks == b.radial_ks);
  CHECK(a.angular_ks == b.angular_ks);
  CHECK(a.median_modulus == b.median_modulus);
}
