#pragma once

#include "semipos/surface.hpp"

namespace semipos {

/// R_t = (1/2π)τ(1 − e^{−tτ})⁻¹e^{−tω}, with ω acting as 0 on functions and
/// as τ on (0,1)-forms. At τ = 0 both components are 1/(2πt).
struct RtValue {
  double functions = 0.0;
  double forms = 0.0;
};
RtValue rt_eval(double tau, double t);

/// Small-t coefficients of R_t on (0,1)-forms, R_t ≈ A₋₁/t + A₀ + O(t),
/// obtained by least-squares fits of t·R_t on a grid of small t.
struct HeatCoefficient {
  double tau = 0.0;
  double a_minus1 = 0.0;
  double a0 = 0.0;
  /// Spread between two fit degrees.
  double a0_error = 0.0;
};
HeatCoefficient heat_coefficients(double tau);

/// The two leading coefficients of the torsion, −ln T ≈ −A·k ln k − B·k:
/// A = ∫(τ/8π)dvol and B = ∫(τ/8π)ln(τ/2π)dvol over the sphere, with
/// x ln x = 0 at the poles.
struct TorsionPrediction {
  double A = 0.0;
  double B = 0.0;
  /// |value − value with doubled nodes|.
  double A_error = 0.0;
  double B_error = 0.0;
  int nodes = 0;
};
TorsionPrediction torsion_coefficients(const SurfaceModel& model);

/// k·deg L + 1.
long riemann_roch_dim(const SurfaceModel& model, int k);

/// The formula next to the monomial basis size and the measured number of
/// Kodaira zero modes. Disagreement raises ConsistencyError.
struct DimensionCheck {
  long formula = 0;
  long basis_size = 0;
  long zero_modes = 0;
};
DimensionCheck dimension_check(const SurfaceModel& model, int k);

}  // namespace semipos
