#pragma once

#include <functional>

namespace semipos {

/// Controls for the radial quadrature rules.
///
/// Nodes start at node_count and double until two successive estimates
/// agree to relative_tolerance; exceeding max_node_count raises
/// ConvergenceError with the last two estimates.
struct QuadratureSpec {
  int node_count = 64;
  double relative_tolerance = 1e-10;
  /// The s in u = t^s/(1+t^s); sets the scale of the ln t variable.
  double substitution_exponent = 1.0;
  int max_node_count = 1 << 18;
  /// Truncation of x = ln t to |x| <= log_range.
  double log_range = 120.0;

  void validate() const;
};

/// ∫₀^∞ f(t) dt.
///
/// Uses u = t^s/(1+t^s) followed by the tanh-sinh map of u ∈ (0,1), which
/// collapses to x = ln t = (π/s)·sinh(v) and a trapezoid rule in v.
/// Endpoint algebraic singularities in u are therefore harmless.
double integrate_radial(const std::function<double(double)>& f, const QuadratureSpec& spec = {});

/// ln ∫₀^∞ exp(L(ln t)) dt, where L is the log integrand written as a function
/// of x = ln t. Suited to integrands spanning hundreds of orders of magnitude.
double integrate_radial_log(const std::function<double(double)>& log_f, const QuadratureSpec& spec = {});

/// ∫_a^b f(x) dx by tanh-sinh; tolerates integrable endpoint singularities.
double integrate_interval(const std::function<double(double)>& f, double a, double b,
                          const QuadratureSpec& spec = {});

/// ln ∫_ℝ exp(L(x)) dx for a unimodal log integrand with mode near `center`
/// and curvature scale `width`.
///
/// Trapezoid rule in x with step halving. The sum is truncated once the
/// integrand drops 50 e-folds below its running maximum on each side.
/// Analytic integrands converge geometrically, so this is much cheaper
/// than the double-exponential rule when the peak is narrow.
double integrate_log_peaked(const std::function<double(double)>& log_f, double center, double width,
                            const QuadratureSpec& spec = {});

}  // namespace semipos
