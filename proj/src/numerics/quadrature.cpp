#include "semipos/numerics/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "semipos/errors.hpp"

namespace semipos {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Log-sum-exp accumulator with a running shift.
struct LogAccumulator {
  double shift = kNegInf;
  double sum = 0.0;
  void add(double log_term) {
    if (log_term == kNegInf) return;
    if (!std::isfinite(log_term)) throw RangeError("quadrature: non-finite log integrand");
    if (log_term > shift) {
      sum = sum * std::exp(shift - log_term) + 1.0;
      shift = log_term;
    } else {
      sum += std::exp(log_term - shift);
    }
  }
  double value() const { return shift == kNegInf ? kNegInf : shift + std::log(sum); }
};

bool close_enough(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)) || (a == 0.0 && b == 0.0);
}

// Trapezoid rule on v ∈ [-V, V] with step 2V/n, refined by halving.
// `term(v)` returns the transformed integrand g(v) (linear domain).
double doubling_trapezoid(const std::function<double(double)>& term, double V, const QuadratureSpec& spec) {
  int n = spec.node_count;
  double h = 2.0 * V / n;
  double sum = 0.0;
  for (int j = 0; j <= n; ++j) sum += term(-V + j * h);
  double estimate = sum * h;
  double previous = std::numeric_limits<double>::quiet_NaN();
  while (true) {
    if (2 * n > spec.max_node_count) {
      throw ConvergenceError("quadrature: node cap reached without convergence", estimate, previous);
    }
    double mid = 0.0;
    for (int j = 0; j < n; ++j) mid += term(-V + (j + 0.5) * h);
    sum += mid;
    n *= 2;
    h *= 0.5;
    previous = estimate;
    estimate = sum * h;
    if (close_enough(estimate, previous, spec.relative_tolerance)) return estimate;
  }
}

}  // namespace

void QuadratureSpec::validate() const {
  if (node_count < 8) throw DomainError("QuadratureSpec: node_count must be >= 8");
  if (!(relative_tolerance > 0.0) || relative_tolerance > 1e-4)
    throw DomainError("QuadratureSpec: relative_tolerance must lie in (0, 1e-4]");
  if (!(substitution_exponent > 0.0)) throw DomainError("QuadratureSpec: substitution_exponent must be positive");
  if (max_node_count < node_count) throw DomainError("QuadratureSpec: max_node_count below node_count");
  if (!(log_range > 0.0)) throw DomainError("QuadratureSpec: log_range must be positive");
}

double integrate_radial(const std::function<double(double)>& f, const QuadratureSpec& spec) {
  spec.validate();
  const double a = std::numbers::pi / spec.substitution_exponent;
  const double V = std::asinh(spec.log_range / a);
  auto term = [&](double v) {
    const double x = a * std::sinh(v);
    const double t = std::exp(x);
    const double fx = f(t);
    if (fx == 0.0) return 0.0;
    if (!std::isfinite(fx)) throw RangeError("integrate_radial: non-finite integrand; use the log form");
    return fx * t * a * std::cosh(v);
  };
  return doubling_trapezoid(term, V, spec);
}

double integrate_radial_log(const std::function<double(double)>& log_f, const QuadratureSpec& spec) {
  spec.validate();
  const double a = std::numbers::pi / spec.substitution_exponent;
  const double V = std::asinh(spec.log_range / a);
  auto log_term = [&](double v) {
    const double x = a * std::sinh(v);
    return log_f(x) + x + std::log(a * std::cosh(v));
  };
  int n = spec.node_count;
  double h = 2.0 * V / n;
  LogAccumulator acc;
  for (int j = 0; j <= n; ++j) acc.add(log_term(-V + j * h));
  double estimate = acc.value() + std::log(h);
  double previous = kNegInf;
  while (true) {
    if (2 * n > spec.max_node_count) {
      throw ConvergenceError("quadrature: node cap reached without convergence", estimate, previous);
    }
    for (int j = 0; j < n; ++j) acc.add(log_term(-V + (j + 0.5) * h));
    n *= 2;
    h *= 0.5;
    previous = estimate;
    estimate = acc.value() + std::log(h);
    if (std::abs(estimate - previous) <= spec.relative_tolerance) return estimate;
  }
}

double integrate_interval(const std::function<double(double)>& f, double a, double b, const QuadratureSpec& spec) {
  spec.validate();
  if (!(b > a)) {
    if (a == b) return 0.0;
    return -integrate_interval(f, b, a, spec);
  }
  const double half = 0.5 * (b - a);
  const double pi2 = 0.5 * std::numbers::pi;
  // At |v| = 5 the nodes sit within 1e-100 of the endpoints, so integrable
  // power singularities at an endpoint of modulus O(1) lose nothing.
  const double V = 5.0;
  auto term = [&](double v) {
    const double s = pi2 * std::sinh(v);
    // Distances to the two endpoints, computed without cancellation.
    const double e = std::exp(-2.0 * std::abs(s));
    const double near = 2.0 * half * e / (1.0 + e);
    double x;
    if (s < 0.0) {
      x = a + near;
    } else {
      x = b - near;
    }
    if (x <= a || x >= b) return 0.0;
    const double c = std::cosh(s);
    const double w = half * pi2 * std::cosh(v) / (c * c);
    const double fx = f(x);
    if (fx == 0.0) return 0.0;
    return fx * w;
  };
  return doubling_trapezoid(term, V, spec);
}

double integrate_log_peaked(const std::function<double(double)>& log_f, double center, double width,
                            const QuadratureSpec& spec) {
  spec.validate();
  if (!(width > 0.0)) throw DomainError("integrate_log_peaked: width must be positive");
  constexpr double kDrop = 50.0;
  double h = width / 2.0;
  double previous = kNegInf;
  double estimate = kNegInf;
  for (int level = 0;; ++level) {
    LogAccumulator acc;
    const double peak = log_f(center);
    acc.add(peak);
    double running_max = peak;
    long evaluated = 1;
    for (int dir = -1; dir <= 1; dir += 2) {
      for (long j = 1;; ++j) {
        const double value = log_f(center + dir * j * h);
        ++evaluated;
        acc.add(value);
        running_max = std::max(running_max, value);
        if (value < running_max - kDrop) break;
        if (evaluated > spec.max_node_count)
          throw ConvergenceError("integrate_log_peaked: tail not reached within node cap", estimate, previous);
      }
    }
    previous = estimate;
    estimate = acc.value() + std::log(h);
    if (level > 0 && std::abs(estimate - previous) <= spec.relative_tolerance) return estimate;
    h *= 0.5;
    if (level > 24) throw ConvergenceError("integrate_log_peaked: step halving cap reached", estimate, previous);
  }
}

}  // namespace semipos
