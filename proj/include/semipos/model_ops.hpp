#pragma once

#include "semipos/numerics/sturm_liouville.hpp"

#include <vector>

namespace semipos {

enum class ModelFlavor { bochner, kodaira };

/// Tangent-plane model with radial field B(ρ) = B₀ρ^{r−2} on (ℝ², dx dy).
///
/// Flux a(ρ) = B₀ρ^r/r; sector m of the Bochner operator acts as
/// −(1/ρ)(ρu′)′ + (m − a)²/ρ² u. The Kodaira flavor subtracts B.
/// Holomorphic sections z^α carry the weight e^{−w}, w = (2B₀/r²)ρ^r,
/// which solves (1/2)Δw = B.
struct ModelOperator {
  int r = 4;
  double B0 = 1.0;
  ModelFlavor flavor = ModelFlavor::bochner;

  void validate() const;
  double field(double rho) const;
  double flux(double rho) const;
  double weight(double rho) const;
  /// Sector potential (m − a)²/ρ² (minus B for Kodaira).
  double potential(int m, double rho) const;
  /// Magnetic length B₀^{−1/r}.
  double length_scale() const;
};

/// Π(0,0) of the model Kodaira kernel, density against dx dy:
/// (r/2π)(2B₀/r²)^{2/r}/Γ(2/r) = 1/‖e^{−w/2}‖².
double model_kernel_diag(int r, double B0);

/// The same constant under the alternative weight normalization
/// (r/2π)(4B₀/r²)^{2/r}/Γ(2/r); differs from model_kernel_diag by 2^{2/r}.
double model_kernel_diag_printed(int r, double B0);

/// ‖z^α e^{−w/2}‖² = (2π/r)Γ((2α+2)/r)(r²/(2B₀))^{(2α+2)/r}.
double model_basis_norm(int r, double B0, int alpha);

/// Grid refinement controls shared by the 1-D model solvers.
struct ModelGrid {
  int nodes = 400;
  /// Relative Richardson error target.
  double tolerance = 1e-8;
  int max_refinements = 5;
  /// Relative distance a window endpoint must keep from every eigenvalue.
  double margin = 1e-3;
  /// Relative target for heat sums. Eigenvector point values carry a
  /// rounding floor near 1e-9 relative on the finest grids.
  double heat_tolerance = 1e-8;
};

/// The `count` lowest eigenvalues of sector m, Richardson-extrapolated.
ExtrapolatedValues model_sector_eigenvalues(const ModelOperator& op, int m, int count, const ModelGrid& grid = {});

struct Lambda0Result {
  double value = 0.0;
  double error = 0.0;
  int sector = 0;
  int nodes = 0;
};

/// Bottom of the Bochner model spectrum, minimized over sectors.
Lambda0Result model_bochner_lambda0(int r, double B0, const ModelGrid& grid = {});

/// Number of model eigenvalues in [c₁, c₂] over all sectors.
/// r = 2 has infinitely degenerate levels and is refused (UnsupportedError);
/// endpoints within grid.margin of an eigenvalue raise IllConditionedWindow.
long model_counting(int r, double B0, double c1, double c2, const ModelGrid& grid = {});

/// Sector-resolved model eigenvalues below E (for audits and reports).
struct SectorTable {
  int m;
  std::vector<double> values;
};
std::vector<SectorTable> model_spectrum_below(int r, double B0, double E, const ModelGrid& grid = {});

/// Ground energy of h(η) = −d²/dx² + (η − c x^{r−1}/(r−1))².
double montgomery_ground(int r, double c, double eta, const ModelGrid& grid = {});

/// inf over η of montgomery_ground (golden-section after a coarse scan).
double montgomery_lambda0(int r, double c, const ModelGrid& grid = {}, double* argmin = nullptr);

/// Number of eigenvalues of h(η) below E (Sturm count on a resolved grid).
int montgomery_count_below(int r, double c, double eta, double E, int nodes = 4000);

/// ∫ dη #{j : μ_j(η) ∈ [a, b)} for the family h(η).
double montgomery_integrated_count(int r, double c, double a, double b, int nodes = 4000);

/// e^{−tΔ}(0,0) from the m = 0 sector, density against dx dy.
double model_heat_diag(int r, double B0, double t, const ModelGrid& grid = {});

/// Mehler closed form at r = 2: B/(4π sinh(Bt)).
double mehler_heat_diag(double B, double t);

/// Search for (t, R) with the heat-weighted mean energy on the disk B_R
/// within ε of λ₀.
struct HeatBottomProbe {
  double t = 0.0;
  double radius = 0.0;
  double ratio = 0.0;
  double lambda0 = 0.0;
  bool satisfied = false;
};
HeatBottomProbe large_time_heat_probe(int r, double B0, double epsilon, const ModelGrid& grid = {});

}  // namespace semipos
