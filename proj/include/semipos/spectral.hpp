#pragma once

#include <vector>

#include "semipos/model_ops.hpp"
#include "semipos/numerics/sturm_liouville.hpp"
#include "semipos/numerics/tridiag.hpp"
#include "semipos/surface.hpp"

namespace semipos {

/// Bochner Δ_k, or the renormalized Kodaira operator 2□ = Δ_k − kτ on functions.
enum class LaplacianKind { bochner, kodaira };

/// Polar-angle interval of a sector solve. A natural end sits on a pole and
/// uses the regular-singular condition; other ends are Dirichlet walls deep
/// in a classically forbidden region.
struct SectorDomain {
  double lo = 0.0;
  double hi = 0.0;
  bool natural_lo = false;
  bool natural_hi = false;
};

/// Sector m of the operator on sections u(θ)e^{imφ} (north-regular gauge),
/// discretized as −(sinθ u′)′ + R²V_m sinθ u = λ R² sinθ u with
/// V_m = (m − k a(θ))²/(R² sin²θ), minus kτ for the Kodaira kind.
/// Eigenvectors normalized in the matrix weight satisfy ∫u² dA/(2π) = 1.
struct RadialSectorOperator {
  int k = 0;
  int m = 0;
  LaplacianKind kind = LaplacianKind::bochner;
  SectorDomain domain;
  double h = 0.0;
  std::vector<double> theta;  // cell centres
  SymmetricTridiagonal matrix;
};

double sector_potential(const SurfaceModel& model, int k, int m, double theta, LaplacianKind kind);

/// Interval carrying every sector-m eigenfunction with energy below E.
SectorDomain sector_domain(const SurfaceModel& model, int k, int m, double E, LaplacianKind kind);

RadialSectorOperator assemble_sector(const SurfaceModel& model, int k, int m, const SectorDomain& domain, int n,
                                     LaplacianKind kind);

/// Discrete Rayleigh quotient uᵀSu / uᵀWu.
double rayleigh_quotient(const RadialSectorOperator& op, const std::vector<double>& u);

/// The `count` lowest eigenvalues of sector m, Richardson-extrapolated.
/// Errors are controlled relative to max(|λ|, k^{2/r} + k|τ|), τ taken at
/// the bottom of the sector well.
ExtrapolatedValues sector_eigenvalues(const SurfaceModel& model, int k, int m, int count, LaplacianKind kind,
                                      const ModelGrid& grid = {});

/// Sectors nearest to each degeneracy point: m = k·a(θ) there.
std::vector<int> anchor_sectors(const SurfaceModel& model, int k);

/// Minimum over sectors of the Bochner ground energy.
Lambda0Result lambda0(const SurfaceModel& model, int k, const ModelGrid& grid = {});

/// Leading constant C of λ₀(k) ≈ C k^{2/r}: the model Bochner energy at the
/// pole jet for cp1, the Montgomery band minimum for the circle profile.
double lambda0_model_constant(const SurfaceModel& model);

struct ExpansionProbe {
  double exponent = 0.0;
  double max_residual = 0.0;
  /// True when every λ(k)k^{−2/r} − C sits below the noise floor.
  bool indeterminate = false;
};
/// Fits ln|λ(k)k^{−2/r} − C| against ln k. Needs at least five points.
ExpansionProbe lambda0_expansion_probe(const std::vector<double>& ks, const std::vector<double>& values, int r,
                                       double C, double noise_floor = 1e-9);

struct SectorSpectrum {
  int m = 0;
  std::vector<double> values;
  std::vector<double> errors;
};
/// All eigenvalues below E, by sector, scanning outward from the anchors.
std::vector<SectorSpectrum> spectrum_below(const SurfaceModel& model, int k, double E, LaplacianKind kind,
                                           const ModelGrid& grid = {});

/// #Spec(Δ_k) ∩ [c₁k^{2/r}, c₂k^{2/r}). Endpoints within grid.margin of an
/// eigenvalue raise IllConditionedWindow.
long weyl_count(const SurfaceModel& model, int k, double c1, double c2, const ModelGrid& grid = {});

/// Limit of weyl_count·k^{−d}: d = 0 with the two-pole model count for cp1,
/// d = 1/r with the equator-integrated Montgomery count for the circle.
double weyl_prediction(const SurfaceModel& model, double c1, double c2);

struct KodairaSpectrum {
  long zero_modes = 0;
  double first_positive = 0.0;
  double first_positive_error = 0.0;
  int first_positive_sector = 0;
  /// Most negative eigenvalue seen (≥ −tolerance·k^{2/r} by construction).
  double most_negative = 0.0;
};
/// Spectrum of 2□ = Δ_k − kτ on functions. With count_zero_modes every
/// sector carrying a holomorphic section is solved; otherwise only sectors
/// near the degeneracy points, which bound the first positive eigenvalue.
KodairaSpectrum kodaira_spectrum(const SurfaceModel& model, int k, bool count_zero_modes = true,
                                 const ModelGrid& grid = {});

/// Mass of the ground state outside the degeneracy neighbourhoods:
/// {t < ρ} ∪ {t > 1/ρ} for cp1, {|θ − π/2| < ρ} for the circle profile.
struct Concentration {
  double mass = 0.0;
  double log_mass = 0.0;
  int sector = 0;
};
Concentration ground_state_concentration(const SurfaceModel& model, int k, double radius,
                                         const ModelGrid& grid = {});

/// e^{−(t/k^{2/r})Δ_k}(y, y) against the reference area, y at polar angle θ.
/// At the poles only one sector contributes; elsewhere every sector is
/// screened by an Agmon estimate and the survivors summed in log form.
struct HeatDiagonal {
  double value = 0.0;
  double log_value = 0.0;
  double log_error = 0.0;
  int sectors = 0;
};
HeatDiagonal heat_diag(const SurfaceModel& model, int k, double t, double theta, const ModelGrid& grid = {});

}  // namespace semipos
