#pragma once

#include <complex>
#include <vector>

namespace semipos {

using cplx = std::complex<double>;

struct RootOptions {
  int max_iterations = 1000;
  /// Accept when the scaled Newton step |p/p'|/max(1,|z|) is below this.
  double residual_tolerance = 1e-8;
  /// Use the companion matrix when Aberth iteration fails and D <= this.
  int companion_fallback_degree = 64;
};

/// Roots of p(z) = Σ c_j z^j, coefficients in ascending order.
///
/// Aberth–Ehrlich simultaneous iteration started on the Newton-polygon
/// circles; evaluation switches to the reversed polynomial for |z| > 1.
/// Exact zero low-order coefficients are deflated as roots at the origin.
/// Coefficients are rescaled to unit max modulus internally.
std::vector<cplx> poly_roots(const std::vector<cplx>& coefficients, const RootOptions& options = {});

/// Roots by eigenvalues of the companion matrix (reference solver).
std::vector<cplx> companion_roots(const std::vector<cplx>& coefficients);

/// Scaled Newton residual |p(z)/p'(z)| / max(1, |z|).
double root_residual(const std::vector<cplx>& coefficients, cplx z);

}  // namespace semipos
