#pragma once

#include <functional>
#include <vector>

namespace semipos {

/// Kolmogorov–Smirnov distance sup |F_n − F| between the empirical CDF of
/// `sample` and `cdf`. `cdf_left` gives F(x⁻); pass it when F has atoms.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf,
                   const std::function<double(double)>& cdf_left = {});

/// Ordinary least squares y ≈ intercept + slope·x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
  double slope_stderr = 0.0;
};
LinearFit ols(const std::vector<double>& x, const std::vector<double>& y);

/// Log-log fit of values against k.
///
/// `slope` and `intercept` are the plain OLS fit of ln value on ln k.
/// The expansion-aware fit models value ≈ A·k^p + C (one subleading
/// constant), chosen by variable projection over p; it is what the
/// Bergman and eigenvalue expansions predict when the first correction
/// sits one full power below the leading term.
struct ExponentFit {
  std::vector<double> log_k;
  std::vector<double> log_value;
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
  /// exp(intercept) after rounding the slope to the nearest 1/12 and refitting.
  double leading_constant = 0.0;
  double rounded_slope = 0.0;
  double expansion_exponent = 0.0;
  double expansion_amplitude = 0.0;
  double expansion_offset = 0.0;
  double expansion_max_residual = 0.0;
};

/// Requires at least five points; throws SampleError otherwise.
ExponentFit fit_scaling(const std::vector<double>& ks, const std::vector<double>& values);

/// Minimize a unimodal function on [a, b] by golden-section search.
double golden_section_minimize(const std::function<double(double)>& f, double a, double b, double tolerance,
                               double* f_min = nullptr);

}  // namespace semipos
