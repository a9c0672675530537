#include "semipos/asymptotics.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "semipos/bergman.hpp"
#include "semipos/errors.hpp"
#include "semipos/spectral.hpp"

namespace semipos {

namespace {

constexpr double kPi = std::numbers::pi;

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// Coefficient of u¹ in a degree-`degree` least-squares fit of g(u).
double linear_coefficient(const Eigen::VectorXd& u, const Eigen::VectorXd& g, int degree, double* constant) {
  Eigen::MatrixXd V(u.size(), degree + 1);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    double p = 1.0;
    for (int j = 0; j <= degree; ++j, p *= u(i)) V(i, j) = p;
  }
  const Eigen::VectorXd c = V.colPivHouseholderQr().solve(g);
  if (constant) *constant = c(0);
  return c(1);
}

struct Sums {
  double A = 0.0;
  double B = 0.0;
};

// Trapezoid rule in x = ln t on [−L, L]; both integrands decay exponentially in |x|.
Sums torsion_sums(int r, int n) {
  constexpr double L = 40.0;
  const double h = 2.0 * L / n;
  Sums s;
  for (int i = 0; i <= n; ++i) {
    const double x = -L + i * h;
    const double log_b = std::log(0.25 * r * r) + (r - 2) * x - 2.0 * softplus(r * x);
    const double log_x = log_b + 2.0 * softplus(2.0 * x);  // ln(b/λ̂) = ln(τ/2π)
    // b·2t·dt with dt = t dx.
    const double w = (i == 0 || i == n ? 0.5 : 1.0) * h * 2.0 * std::exp(log_b + 2.0 * x);
    s.A += 0.25 * w;
    s.B += 0.25 * w * log_x;
  }
  return s;
}

}  // namespace

RtValue rt_eval(double tau, double t) {
  if (!(t > 0.0) || std::isinf(t)) throw DomainError("rt_eval: need 0 < t < ∞");
  if (!(tau >= 0.0) || std::isinf(tau)) throw DomainError("rt_eval: need finite τ ≥ 0");
  RtValue v;
  if (tau == 0.0) {
    v.functions = v.forms = 1.0 / (2.0 * kPi * t);
    return v;
  }
  const double x = t * tau;
  v.functions = tau / (2.0 * kPi * -std::expm1(-x));
  v.forms = tau / (2.0 * kPi * std::expm1(x));
  return v;
}

HeatCoefficient heat_coefficients(double tau) {
  if (!(tau >= 0.0) || std::isinf(tau)) throw DomainError("heat_coefficients: need finite τ ≥ 0");
  const double scale = std::max(tau, 1.0);
  // t·R_t is analytic in tτ for |tτ| < 2π; sample well inside that disc.
  constexpr int n = 24;
  Eigen::VectorXd u(n), g(n);
  for (int i = 0; i < n; ++i) {
    u(i) = (i + 1.0) / n;
    const double t = u(i) / scale;
    g(i) = t * rt_eval(tau, t).forms;
  }
  HeatCoefficient out;
  out.tau = tau;
  const double a6 = linear_coefficient(u, g, 6, nullptr) * scale;
  out.a0 = linear_coefficient(u, g, 8, &out.a_minus1) * scale;
  out.a0_error = std::abs(out.a0 - a6);
  return out;
}

TorsionPrediction torsion_coefficients(const SurfaceModel& model) {
  if (model.kind() != SurfaceKind::cp1_semipositive) throw DomainError("torsion_coefficients: requires the cp1 model");
  const int r = model.r();
  int n = 64;
  Sums previous = torsion_sums(r, n);
  Sums s = previous;
  for (n *= 2; n <= (1 << 16); n *= 2) {
    s = torsion_sums(r, n);
    const double dA = std::abs(s.A - previous.A), dB = std::abs(s.B - previous.B);
    if (dA < 1e-13 && dB < 1e-13) return TorsionPrediction{s.A, s.B, dA, dB, n};
    previous = s;
  }
  throw ConvergenceError("torsion_coefficients: trapezoid sums did not settle", s.B, previous.B);
}

long riemann_roch_dim(const SurfaceModel& model, int k) {
  if (k < 0) throw DomainError("riemann_roch_dim: k must be non-negative");
  const double d = model.degree() * k;
  if (std::abs(d - std::round(d)) > 1e-9) throw DomainError("riemann_roch_dim: k·deg L is not an integer");
  return std::lround(d) + 1;
}

DimensionCheck dimension_check(const SurfaceModel& model, int k) {
  if (model.kind() != SurfaceKind::cp1_semipositive) throw DomainError("dimension_check: requires the cp1 model");
  DimensionCheck c;
  c.formula = riemann_roch_dim(model, k);
  c.basis_size = section_norms(model, k, MeasureTag::omega_r).size();
  c.zero_modes = kodaira_spectrum(model, k, true).zero_modes;
  if (c.basis_size != c.formula || c.zero_modes != c.formula)
    throw ConsistencyError("dimension_check: formula " + std::to_string(c.formula) + ", basis " +
                           std::to_string(c.basis_size) + ", zero modes " + std::to_string(c.zero_modes));
  return c;
}

}  // namespace semipos
