#include "semipos/surface.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "semipos/errors.hpp"
#include "semipos/numerics/quadrature.hpp"

namespace semipos {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string to_string(SurfaceKind kind) {
  return kind == SurfaceKind::cp1_semipositive ? "cp1_semipositive" : "circle_degenerate";
}

double reference_radius() { return 0.5 / std::sqrt(kPi); }

double theta_of_t(double t) {
  if (std::isinf(t)) return kPi;
  return 2.0 * std::atan(t);
}

double t_of_theta(double theta) { return std::tan(0.5 * theta); }

SurfaceModel SurfaceModel::cp1(int r) {
  if (r < 2 || r % 2 != 0) throw DomainError("cp1_semipositive requires even r >= 2");
  return SurfaceModel(SurfaceKind::cp1_semipositive, r, 0.0);
}

SurfaceModel SurfaceModel::circle(int r, double amplitude) {
  if (r < 3) throw DomainError("circle_degenerate requires r >= 3");
  if (!(amplitude > 0.0)) throw DomainError("circle_degenerate requires a positive amplitude");
  SurfaceModel m(SurfaceKind::circle_degenerate, r, amplitude);
  const double deg = m.degree();
  if (std::abs(deg - std::round(deg)) > 1e-9)
    throw DomainError("circle_degenerate: total flux must be an integer (adjust the amplitude)");
  return m;
}

std::string SurfaceModel::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << "(r=" << r_;
  if (kind_ == SurfaceKind::circle_degenerate) os << ", beta=" << amplitude_;
  os << ")";
  return os.str();
}

double SurfaceModel::reference_density(double t) const {
  const double d = 1.0 + t * t;
  return 1.0 / (d * d);
}

double SurfaceModel::b(double t) const {
  if (t < 0.0) throw DomainError("SurfaceModel::b: t must be non-negative");
  if (kind_ == SurfaceKind::cp1_semipositive) {
    if (std::isinf(t)) return 0.0;
    const double tr = std::pow(t, r_);
    // (r²/4) t^{r−2} (1+t^r)^{−2}, written to stay finite for large t.
    const double x = (r_ == 2) ? 1.0 : std::pow(t, r_ - 2);
    const double denom = (1.0 + tr) * (1.0 + tr);
    if (!std::isfinite(denom)) return 0.25 * r_ * r_ * std::pow(t, -r_ - 2);
    return 0.25 * r_ * r_ * x / denom;
  }
  return tau(*this, t) * reference_density(t) / (2.0 * kPi);
}

double SurfaceModel::potential(double t) const {
  if (kind_ != SurfaceKind::cp1_semipositive) throw UnsupportedError("potential: only defined for cp1_semipositive");
  return std::log1p(std::pow(t, r_));
}

double SurfaceModel::field_theta(double theta) const {
  if (kind_ == SurfaceKind::cp1_semipositive) {
    const double t = t_of_theta(theta);
    // τ = 2π b/λ̂ = (π r²/2) t^{r−2}(1+t²)²/(1+t^r)².
    if (theta >= kPi) return r_ == 2 ? 2.0 * kPi : 0.0;
    const double num = (1.0 + t * t) / (1.0 + std::pow(t, r_));
    return 0.5 * kPi * r_ * r_ * std::pow(t, r_ - 2) * num * num;
  }
  return amplitude_ * std::pow(std::cos(theta), r_ - 2);
}

double SurfaceModel::flux_theta(double theta) const {
  if (kind_ == SurfaceKind::cp1_semipositive) {
    if (theta >= kPi) return 0.5 * r_;
    const double t = t_of_theta(theta);
    const double tr = std::pow(t, r_);
    return 0.5 * r_ * tr / (1.0 + tr);
  }
  const double R2 = reference_radius() * reference_radius();
  const int n = r_ - 2;
  return amplitude_ * R2 * (1.0 - std::pow(std::cos(theta), n + 1)) / (n + 1);
}

double SurfaceModel::degree() const { return flux_theta(kPi); }

double SurfaceModel::flux_min() const { return 0.0; }

double SurfaceModel::flux_max() const {
  if (kind_ == SurfaceKind::cp1_semipositive) return 0.5 * r_;
  const double R2 = reference_radius() * reference_radius();
  const int n = r_ - 2;
  // 1 − cos^{n+1}θ peaks at θ = π for even n and at θ = π/2 for odd n.
  if (n % 2 == 0) return amplitude_ * R2 * 2.0 / (n + 1);
  return amplitude_ * R2 / (n + 1);
}

bool SurfaceModel::is_degeneracy_point(double t) const {
  if (kind_ == SurfaceKind::cp1_semipositive) return r_ > 2 && (t == 0.0 || std::isinf(t));
  return t == 1.0;
}

int vanishing_order(const SurfaceModel& model, double t) {
  if (t < 0.0) throw DomainError("vanishing_order: t must be non-negative");
  return model.is_degeneracy_point(t) ? model.r() : 2;
}

double tau(const SurfaceModel& model, double t) {
  if (t < 0.0) throw DomainError("tau: t must be non-negative");
  return model.field_theta(theta_of_t(t));
}

double jet_coefficient(const SurfaceModel& model, Pole pole) {
  const double R = reference_radius();
  if (model.kind() == SurfaceKind::cp1_semipositive) {
    if (pole == Pole::equator) throw DomainError("jet_coefficient: the equator is not a degeneracy point of cp1");
    const int r = model.r();
    // Near t = 0: τ ≈ 2π(r²/4)t^{r−2}/λ̂(0) and the geodesic distance is
    // ρ ≈ t·√(λ̂(0)/π), so B₀ = (π r²/2)·π^{(r−2)/2}. The south pole is the
    // mirror image under t ↦ 1/t.
    return 0.5 * r * r * std::pow(kPi, 0.5 * r);
  }
  if (pole != Pole::equator) throw DomainError("jet_coefficient: poles are not degeneracy points of the circle model");
  // τ = β cos^{r−2}θ and the normal distance is y = R(θ − π/2).
  return model.amplitude() / std::pow(R, model.r() - 2);
}

double degree_by_quadrature(const SurfaceModel& model) {
  QuadratureSpec spec;
  spec.relative_tolerance = 1e-12;
  spec.substitution_exponent = model.r();
  // ∫ b (1/π) dA = ∫₀^∞ 2t b(t) dt.
  return integrate_radial([&](double t) { return 2.0 * t * model.b(t); }, spec);
}

}  // namespace semipos
