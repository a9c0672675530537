#include "semipos/bergman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "semipos/errors.hpp"
#include "semipos/model_ops.hpp"
#include "semipos/numerics/quadrature.hpp"
#include "semipos/numerics/special.hpp"
#include "semipos/numerics/stats.hpp"
#include "semipos/parallel.hpp"

namespace semipos {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln(1 + e^y).
double softplus(double y) { return y > 0.0 ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y)); }
double logistic(double y) { return y > 0.0 ? 1.0 / (1.0 + std::exp(-y)) : std::exp(y) / (1.0 + std::exp(y)); }

// ln of the round-norm integrand in x = ln t, including the dt = t dx factor.
double round_log_integrand(int r, int k, int alpha, double x) {
  return std::log(2.0) + (2.0 * alpha + 2.0) * x - k * softplus(r * x) - 2.0 * softplus(2.0 * x);
}

double round_norm_at(int r, int k, int alpha) {
  // The log integrand is concave; its slope 2α+2 − kr·σ(rx) − 4σ(2x) decreases from
  // 2α+2 to 2α−rk−2, so the mode is bracketed.
  auto slope = [&](double x) { return 2.0 * alpha + 2.0 - k * r * logistic(r * x) - 4.0 * logistic(2.0 * x); };
  double lo = -1.0, hi = 1.0;
  while (slope(lo) < 0.0) lo *= 2.0;
  while (slope(hi) > 0.0) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) > 0.0 ? lo : hi) = mid;
  }
  const double x0 = 0.5 * (lo + hi);
  const double s1 = logistic(r * x0), s2 = logistic(2.0 * x0);
  const double curvature = k * r * r * s1 * (1.0 - s1) + 8.0 * s2 * (1.0 - s2);
  QuadratureSpec spec;
  // The log integrand is O(k) in size, so rounding caps the attainable agreement near 1e-12.
  spec.relative_tolerance = 1e-11;
  return integrate_log_peaked([&](double x) { return round_log_integrand(r, k, alpha, x); }, x0,
                              1.0 / std::sqrt(curvature), spec);
}

void check_basis(const SectionBasis& basis) {
  if (basis.k <= 0 || static_cast<int>(basis.log_norms.size()) != basis.D + 1)
    throw ContractError("SectionBasis: inconsistent size");
}

// ln of |z^α|²_h / ‖z^α‖² at ln t = y, evaluated without cancellation for either sign of y.
double log_term(const SectionBasis& basis, int alpha, double y) {
  if (y <= 0.0) return 2.0 * alpha * y - basis.k * std::log1p(std::exp(basis.r * y)) - basis.log_norms[alpha];
  return -2.0 * (basis.D - alpha) * y - basis.k * std::log1p(std::exp(-basis.r * y)) - basis.log_norms[alpha];
}

// Converts x-derivatives (x = ln s) into s-derivatives by Stirling numbers of the first kind.
std::vector<double> x_to_s(const std::vector<double>& gx, double s) {
  static const double stirling[5][5] = {
      {1, 0, 0, 0, 0}, {0, 1, 0, 0, 0}, {0, -1, 1, 0, 0}, {0, 2, -3, 1, 0}, {0, -6, 11, -6, 1}};
  std::vector<double> out(gx.size());
  out[0] = gx[0];
  for (std::size_t n = 1; n < gx.size(); ++n) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= n; ++j) acc += stirling[n][j] * gx[j];
    out[n] = acc / std::pow(s, static_cast<double>(n));
  }
  return out;
}

// Derivatives of exp(F) from those of F, via the Taylor exponential recursion.
std::vector<double> exp_jet(const std::vector<double>& f) {
  const std::size_t n = f.size();
  std::vector<double> c(n), b(n), out(n);
  double fact = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j > 0) fact *= j;
    c[j] = f[j] / fact;
  }
  b[0] = std::exp(c[0]);
  for (std::size_t m = 1; m < n; ++m) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= m; ++j) acc += j * c[j] * b[m - j];
    b[m] = acc / m;
  }
  fact = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j > 0) fact *= j;
    out[j] = b[j] * fact;
  }
  return out;
}

}  // namespace

std::string to_string(MeasureTag tag) { return tag == MeasureTag::omega_r ? "omega_r" : "round"; }

MeasureTag measure_from_string(const std::string& name) {
  if (name == "omega_r") return MeasureTag::omega_r;
  if (name == "round") return MeasureTag::round;
  throw DomainError("unknown measure '" + name + "' (expected omega_r or round)");
}

double SectionBasis::norm(int alpha) const {
  if (alpha < 0 || alpha > D) throw DomainError("SectionBasis::norm: α out of range");
  return std::exp(log_norms[alpha]);
}

double SectionBasis::measure_density(const SurfaceModel& model, double t) const {
  return measure == MeasureTag::omega_r ? model.b(t) : model.reference_density(t);
}

SectionBasis section_norms(const SurfaceModel& model, int k, MeasureTag measure) {
  if (model.kind() != SurfaceKind::cp1_semipositive) throw DomainError("section_norms: requires the cp1 model");
  if (k <= 0) throw DomainError("section_norms: k must be positive");
  SectionBasis basis;
  basis.r = model.r();
  basis.k = k;
  basis.D = basis.r * k / 2;
  basis.measure = measure;
  basis.log_norms.assign(basis.D + 1, 0.0);
  const int r = basis.r;
  if (measure == MeasureTag::omega_r) {
    for (int a = 0; a <= basis.D; ++a) {
      const double p = 2.0 * a / r;
      basis.log_norms[a] = std::log(0.5 * r) + log_beta(p + 1.0, k + 1.0 - p);
    }
    return basis;
  }
  // The round metric is invariant under t ↦ 1/t, which exchanges α and D − α.
  const int half = basis.D / 2;
  parallel_for(half + 1, [&](std::size_t a) { basis.log_norms[a] = round_norm_at(r, k, static_cast<int>(a)); });
  for (int a = half + 1; a <= basis.D; ++a) basis.log_norms[a] = basis.log_norms[basis.D - a];
  return basis;
}

double omega_norm_by_quadrature(int r, int k, int alpha) {
  QuadratureSpec spec;
  spec.relative_tolerance = 1e-13;
  spec.substitution_exponent = r;
  // 2t·t^{2α}(1+t^r)^{−k}·b(t) as a function of x = ln t.
  return std::exp(integrate_radial_log(
      [&](double x) {
        return std::log(0.5 * r * r) + (2.0 * alpha + r - 1.0) * x - (k + 2.0) * softplus(r * x);
      },
      spec));
}

double round_norm_direct(int r, int k, int alpha) {
  if (k <= 0 || alpha < 0 || 2 * alpha > r * k) throw DomainError("round_norm_direct: α out of range");
  return std::exp(round_norm_at(r, k, alpha));
}

double bergman_log_diag(const SectionBasis& basis, double t) {
  check_basis(basis);
  if (!(t >= 0.0)) throw DomainError("bergman_diag: t must be non-negative");
  if (t == 0.0) return -basis.log_norms[0];
  if (std::isinf(t)) return -basis.log_norms[basis.D];
  const double y = std::log(t);
  double acc = kNegInf;
  for (int a = 0; a <= basis.D; ++a) acc = log_add(acc, log_term(basis, a, y));
  if (!std::isfinite(acc)) throw RangeError("bergman_diag: log-domain sum is not finite");
  return acc;
}

double bergman_diag(const SectionBasis& basis, double t) {
  const double v = std::exp(bergman_log_diag(basis, t));
  if (!std::isfinite(v) || v <= 0.0) throw RangeError("bergman_diag: value overflows; use bergman_log_diag");
  return v;
}

BergmanJet bergman_jet(const SectionBasis& basis, double t, int order) {
  check_basis(basis);
  if (order < 0 || order > 4) throw DomainError("bergman_jet: order must lie in 0..4");
  if (!(t >= 0.0) || std::isinf(t)) throw DomainError("bergman_jet: t must be finite and non-negative");
  const int n = order + 1;
  const int q = basis.r / 2;  // t^r = s^q
  BergmanJet jet;
  jet.t = t;
  jet.log_x.assign(n, 0.0);
  jet.log_x[0] = bergman_log_diag(basis, t);
  if (t == 0.0) {
    // Taylor coefficients of ln(Σ s^α/N_α) − k ln(1 + s^q) at s = 0.
    std::vector<double> a(n, 0.0), c(n, 0.0);
    for (int j = 1; j < n && j <= basis.D; ++j) a[j] = std::exp(basis.log_norms[0] - basis.log_norms[j]);
    for (int m = 1; m < n; ++m) {
      double acc = m * a[m];
      for (int j = 1; j < m; ++j) acc -= j * c[j] * a[m - j];
      c[m] = acc / m;
    }
    for (int j = 1; j * q < n; ++j) c[j * q] -= basis.k * ((j % 2) ? 1.0 : -1.0) / j;
    jet.log_s.assign(n, 0.0);
    jet.log_s[0] = jet.log_x[0];
    double fact = 1.0;
    for (int m = 1; m < n; ++m) {
      fact *= m;
      jet.log_s[m] = c[m] * fact;
    }
    jet.s = exp_jet(jet.log_s);
    return jet;
  }
  // ln Σ e^{αx}/N_α has the cumulants of α under p_α ∝ e^{αx}/N_α as x-derivatives.
  const double x = 2.0 * std::log(t);
  std::vector<double> lw(basis.D + 1);
  double lz = kNegInf;
  for (int a = 0; a <= basis.D; ++a) {
    lw[a] = a * x - basis.log_norms[a];
    lz = log_add(lz, lw[a]);
  }
  double mean = 0.0;
  for (int a = 0; a <= basis.D; ++a) mean += a * std::exp(lw[a] - lz);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (int a = 0; a <= basis.D; ++a) {
    const double p = std::exp(lw[a] - lz), d = a - mean;
    m2 += p * d * d;
    m3 += p * d * d * d;
    m4 += p * d * d * d * d;
  }
  const double kappa[5] = {0.0, mean, m2, m3, m4 - 3.0 * m2 * m2};
  // −k ln(1 + e^{qx}).
  const double sg = logistic(q * x), v = sg * (1.0 - sg);
  const double logistic_part[5] = {0.0, -basis.k * q * sg, -basis.k * q * q * v,
                                   -basis.k * std::pow(q, 3) * v * (1.0 - 2.0 * sg),
                                   -basis.k * std::pow(q, 4) * v * (1.0 - 6.0 * sg + 6.0 * sg * sg)};
  for (int j = 1; j < n; ++j) jet.log_x[j] = kappa[j] + logistic_part[j];
  jet.log_s = x_to_s(jet.log_x, t * t);
  jet.s = exp_jet(jet.log_s);
  return jet;
}

double log_diag_geodesic_derivative(const SectionBasis& basis, double t) {
  double sign = 1.0;
  if (t > 1.0) {
    t = 1.0 / t;
    sign = -1.0;
  }
  if (t == 0.0) return 0.0;
  // dθ/dt = 2/(1+t²), ∂_t = 2t ∂_s, arc length = Rθ.
  const auto jet = bergman_jet(basis, t, 1);
  return sign * (1.0 + t * t) * t * jet.log_s[1] / reference_radius();
}

double log_diag_laplacian(const SectionBasis& basis, double t) {
  if (t > 1.0) t = 1.0 / t;
  // ∂∂̄f = ∂_s f + s ∂_s² f against (1/π)dx dy.
  const auto jet = bergman_jet(basis, t, 2);
  const double s = t * t;
  return (jet.log_s[1] + s * jet.log_s[2]) * (1.0 + s) * (1.0 + s);
}

std::vector<double> hemisphere_grid(int n) {
  if (n < 2) throw DomainError("hemisphere_grid: need at least two points");
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = t_of_theta(0.5 * kPi * i / (n - 1));
  grid.back() = 1.0;
  return grid;
}

TianGap tian_gap(const SectionBasis& basis, const std::vector<double>& grid) {
  TianGap gap;
  gap.k = basis.k;
  std::vector<double> pot(grid.size()), der(grid.size()), lap(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    pot[i] = std::abs(bergman_log_diag(basis, grid[i]));
    der[i] = std::abs(log_diag_geodesic_derivative(basis, grid[i]));
    lap[i] = std::abs(log_diag_laplacian(basis, grid[i]));
  });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    gap.potential = std::max(gap.potential, pot[i] / basis.k);
    gap.derivative = std::max(gap.derivative, der[i] / basis.k);
    gap.laplacian = std::max(gap.laplacian, lap[i] / basis.k);
  }
  return gap;
}

namespace {

double sup_field_ratio(const SurfaceModel& model) {
  // b/λ̂ is symmetric under t ↦ 1/t; scan the hemisphere then refine.
  auto f = [&](double theta) { return -model.b(t_of_theta(theta)) / model.reference_density(t_of_theta(theta)); };
  const int n = 2000;
  int best = 0;
  double best_value = INFINITY;
  for (int i = 0; i <= n; ++i) {
    const double v = f(0.5 * kPi * i / n);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  const double h = 0.5 * kPi / n;
  double fmin = best_value;
  golden_section_minimize(f, std::max(0.0, (best - 1) * h), std::min(0.5 * kPi, (best + 1) * h), 1e-12, &fmin);
  return -std::min(fmin, best_value);
}

}  // namespace

UniformBounds uniform_bounds_check(const SurfaceModel& model, const SectionBasis& basis,
                                   const std::vector<double>& grid, double lower_scale) {
  if (basis.measure != MeasureTag::round) throw DomainError("uniform_bounds_check: requires the round measure");
  UniformBounds out;
  const int r = basis.r;
  out.lower_constant = 0.9 * lower_scale * model_kernel_diag(r, jet_coefficient(model, Pole::north));
  out.upper_constant = 1.1 * sup_field_ratio(model);
  const double lower = out.lower_constant * std::pow(static_cast<double>(basis.k), 2.0 / r);
  const double upper = out.upper_constant * basis.k;
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { values[i] = bergman_diag(basis, grid[i]); });
  out.worst_lower_ratio = INFINITY;
  out.worst_upper_ratio = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.worst_lower_ratio = std::min(out.worst_lower_ratio, values[i] / lower);
    out.worst_upper_ratio = std::max(out.worst_upper_ratio, values[i] / upper);
    if (values[i] < lower) out.lower_violations.push_back(grid[i]);
    if (values[i] > upper) out.upper_violations.push_back(grid[i]);
  }
  out.passed = out.lower_violations.empty() && out.upper_violations.empty();
  return out;
}

}  // namespace semipos
