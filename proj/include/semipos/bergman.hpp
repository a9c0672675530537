#pragma once

#include <string>
#include <vector>

#include "semipos/surface.hpp"

namespace semipos {

/// Measure used to define the L² norms of sections.
///  - omega_r: the curvature form itself, (i/2π)∂∂̄φ (degenerate at the poles);
///  - round: the area-1 round metric.
enum class MeasureTag { omega_r, round };
std::string to_string(MeasureTag tag);
MeasureTag measure_from_string(const std::string& name);

/// Norms ‖z^α‖² of the monomial sections, α = 0..D with D = rk/2.
struct SectionBasis {
  int r = 0;
  int k = 0;
  int D = 0;
  MeasureTag measure = MeasureTag::omega_r;
  std::vector<double> log_norms;
  double norm(int alpha) const;
  int size() const { return D + 1; }
  /// Density of the tagged measure against (1/π)dx dy.
  double measure_density(const SurfaceModel& model, double t) const;
};

/// ‖z^α‖² for the CP¹ model. omega_r uses (r/2)·B(2α/r+1, k+1−2α/r);
/// round uses quadrature in ln t around the mode of the integrand.
SectionBasis section_norms(const SurfaceModel& model, int k, MeasureTag measure);

/// ω_r norm by direct quadrature, for checking the closed form.
double omega_norm_by_quadrature(int r, int k, int alpha);
/// Round norm for a single α without the t ↦ 1/t mirror.
double round_norm_direct(int r, int k, int alpha);

/// ln Π_k(t), Π_k a density against the tagged measure. t may be +∞.
double bergman_log_diag(const SectionBasis& basis, double t);
double bergman_diag(const SectionBasis& basis, double t);

/// Radial jet of the diagonal at t.
///
/// s-derivatives are taken in s = t², x-derivatives in x = ln s.
/// Index 0 holds the value. At t = 0 the x-derivatives are zero and the
/// s-derivatives come from the Taylor coefficients of the section sum.
struct BergmanJet {
  double t = 0.0;
  std::vector<double> log_s;  // ∂_sʲ ln Π
  std::vector<double> s;      // ∂_sʲ Π
  std::vector<double> log_x;  // ∂_xʲ ln Π
};
/// order ≤ 4; t ∈ [0, ∞).
BergmanJet bergman_jet(const SectionBasis& basis, double t, int order);

/// Geodesic derivative of ln Π_k on the area-1 sphere.
double log_diag_geodesic_derivative(const SectionBasis& basis, double t);
/// ∂∂̄ ln Π_k divided by the round density: the change of curvature density
/// between the induced and the original metric, times k.
double log_diag_laplacian(const SectionBasis& basis, double t);

/// t-grid uniform in the polar angle on [0, π/2]; the other half follows by t ↦ 1/t.
std::vector<double> hemisphere_grid(int n);

struct TianGap {
  int k = 0;
  double potential = 0.0;
  double derivative = 0.0;
  double laplacian = 0.0;
};
/// Sup-norm gaps between the induced Fubini–Study data and the original
/// metric, each divided by k.
TianGap tian_gap(const SectionBasis& basis, const std::vector<double>& grid);

struct UniformBounds {
  bool passed = false;
  double lower_constant = 0.0;
  double upper_constant = 0.0;
  /// min Π/(c k^{2/r}) and max Π/(C k) over the grid.
  double worst_lower_ratio = 0.0;
  double worst_upper_ratio = 0.0;
  std::vector<double> lower_violations;
  std::vector<double> upper_violations;
};
/// Checks c k^{2/r} ≤ Π_k ≤ C k with c = 0.9·lower_scale·(model kernel at the
/// pole) and C = 1.1·sup τ/2π. Round measure only.
UniformBounds uniform_bounds_check(const SurfaceModel& model, const SectionBasis& basis,
                                   const std::vector<double>& grid, double lower_scale = 1.0);

}  // namespace semipos
