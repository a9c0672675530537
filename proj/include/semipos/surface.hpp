#pragma once

#include <string>

namespace semipos {

enum class SurfaceKind { cp1_semipositive, circle_degenerate };

std::string to_string(SurfaceKind kind);

/// Rotation-invariant line bundle over the sphere, described in the affine
/// coordinate z with t = |z|, or equivalently the polar angle θ = 2 atan t.
///
/// Conventions, fixed once:
///  - densities are taken against (i/2π)dz∧dz̄ = (1/π)dx dy;
///  - the reference metric is the round Fubini–Study metric of total area 1,
///    density λ̂(t) = (1+t²)⁻², sphere radius R with 4πR² = 1;
///  - τ = 2π·b/λ̂ is the magnetic field per unit reference area.
///
/// cp1_semipositive: φ = ln(1+t^r), b = (r²/4)t^{r−2}(1+t^r)⁻², deg = r/2.
/// circle_degenerate: field τ(θ) = β·cos^{r−2}θ, vanishing on the equator
/// t = 1; its flux must be integral when r is even.
class SurfaceModel {
 public:
  static SurfaceModel cp1(int r);
  static SurfaceModel circle(int r, double amplitude);

  SurfaceKind kind() const { return kind_; }
  int r() const { return r_; }
  double amplitude() const { return amplitude_; }
  std::string describe() const;

  /// Curvature density against (i/2π)dz∧dz̄.
  double b(double t) const;
  /// Weight potential φ(t); only defined for cp1_semipositive.
  double potential(double t) const;
  /// Density of the reference Kähler form against (i/2π)dz∧dz̄.
  double reference_density(double t) const;
  /// Magnetic field per unit reference area, as a function of θ.
  double field_theta(double theta) const;
  /// Flux a(θ) = ∫₀^θ τ R² sin θ' dθ' for k = 1 (north-regular gauge).
  double flux_theta(double theta) const;
  /// Total flux a(π) = deg L.
  double degree() const;
  /// Range of the flux over [0, π].
  double flux_min() const;
  double flux_max() const;

  bool is_degeneracy_point(double t) const;

 private:
  SurfaceModel(SurfaceKind kind, int r, double amplitude) : kind_(kind), r_(r), amplitude_(amplitude) {}
  SurfaceKind kind_;
  int r_;
  double amplitude_;
};

/// Sphere radius of the area-1 round metric.
double reference_radius();

/// t = |z| ↔ polar angle.
double theta_of_t(double t);
double t_of_theta(double theta);

/// Vanishing order r_y at t (t = ∞ allowed as INFINITY).
int vanishing_order(const SurfaceModel& model, double t);

/// τ(t) = 2π b(t)/λ̂(t).
double tau(const SurfaceModel& model, double t);

/// Degeneracy points in the t coordinate: {0, ∞} for cp1, {1} for circle.
enum class Pole { north, south, equator };

/// Leading coefficient B₀ of the field, B ≈ B₀|y|^{r−2}, in geodesic
/// coordinates y of the reference metric. For the circle model y is the
/// signed normal distance to the equator.
double jet_coefficient(const SurfaceModel& model, Pole pole);

/// ∫ b·(1/π)dA by quadrature.
double degree_by_quadrature(const SurfaceModel& model);

}  // namespace semipos
