#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "semipos/surface.hpp"

namespace semipos {

/// full: α = 0..rk/2, every holomorphic section.
/// literal: α = 0..k, degree-k polynomials with the same weights.
enum class BasisRange { full, literal };
std::string to_string(BasisRange range);
BasisRange basis_range_from_string(const std::string& name);

/// Gaussian ensemble p(z) = Σ c_α z^α/‖s_α‖ with ω_r norms and
/// i.i.d. standard complex c_α; trial i draws from seed hash(seed, i).
struct RandomEnsemble {
  SurfaceModel model = SurfaceModel::cp1(2);
  int k = 1;
  BasisRange range = BasisRange::full;
  std::uint64_t seed = 1;
  int trials = 10;

  int degree() const;
};

/// Ascending coefficients of the trial-th polynomial.
std::vector<std::complex<double>> sample_section(const RandomEnsemble& ensemble, int trial);

/// Roots of the trial-th polynomial.
std::vector<std::complex<double>> sample_zeros(const RandomEnsemble& ensemble, int trial);

/// Mass of {|z| ≤ s} under ω_r/(r/2): s^r/(1+s^r).
double limit_radial_cdf(int r, double s);

/// Expected fraction of zeros in {|z| ≤ s} at finite k for the ensemble:
/// the weighted mean of α/degree with weights s^{2α}/‖s_α‖².
double expected_radial_cdf(const RandomEnsemble& ensemble, double s);

struct ZeroStatistics {
  int trials = 0;
  int failures = 0;
  int degree = 0;
  /// Mean KS distance of root moduli to the limit CDF s^r/(1+s^r).
  double radial_ks = 0.0;
  /// Mean KS distance of root moduli to the finite-k expected CDF.
  double radial_ks_expected = 0.0;
  /// Mean KS distance of arguments to the uniform law on [0, 2π).
  double angular_ks = 0.0;
  double median_modulus = 0.0;
};
/// Root-finder failures above 1% of trials raise DataQualityError.
ZeroStatistics zero_statistics(const RandomEnsemble& ensemble);

struct ZeroDensityCheck {
  double mean_count = 0.0;
  double standard_error = 0.0;
  /// Finite-k expectation from the kernel.
  double expected_count = 0.0;
  /// k·∫ ω_r over the annulus.
  double limit_count = 0.0;
  /// (mean_count − limit_count)/limit_count.
  double relative_gap = 0.0;
};
/// Zeros in {inner < |z| < outer}; outer may be +∞. Needs at least 100 trials.
ZeroDensityCheck expected_zero_density_check(const RandomEnsemble& ensemble, double inner, double outer);

/// Monte Carlo mean of |p(z)|²e^{−kφ} at |z| = t, and its standard error.
struct VarianceAudit {
  double mean = 0.0;
  double standard_error = 0.0;
  double kernel = 0.0;
};
VarianceAudit variance_audit(const RandomEnsemble& ensemble, double t);

}  // namespace semipos
