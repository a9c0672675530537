#include "semipos/numerics/roots.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "semipos/errors.hpp"

namespace semipos {

namespace {

struct Evaluation {
  cplx ratio;       // p(z)/p'(z)
  bool converged;   // backward-error stopping test
};

// Evaluate p/p' at z with a backward-error stop in the style of MPSolve:
// |p(z)| <= 4 D ε · Σ|c_j||z|^j. Uses the reversed polynomial when |z| > 1.
Evaluation evaluate(const std::vector<cplx>& c, const std::vector<double>& abs_c, cplx z) {
  const int d = static_cast<int>(c.size()) - 1;
  const double eps = std::numeric_limits<double>::epsilon();
  if (std::abs(z) <= 1.0) {
    cplx p = c[d], dp = 0.0;
    double bound = abs_c[d];
    const double az = std::abs(z);
    for (int j = d - 1; j >= 0; --j) {
      dp = dp * z + p;
      p = p * z + c[j];
      bound = bound * az + abs_c[j];
    }
    return {p / dp, std::abs(p) <= 4.0 * d * eps * bound};
  }
  // q(w) = w^D p(1/w) = Σ c_{D-j} w^j; p'/p = w (D − w q'/q).
  const cplx w = 1.0 / z;
  const double aw = std::abs(w);
  cplx q = c[0], dq = 0.0;
  double bound = abs_c[0];
  for (int j = 1; j <= d; ++j) {
    dq = dq * w + q;
    q = q * w + c[j];
    bound = bound * aw + abs_c[j];
  }
  const cplx dp_over_p = w * (static_cast<double>(d) - w * dq / q);
  return {1.0 / dp_over_p, std::abs(q) <= 4.0 * d * eps * bound};
}

// Initial approximations on circles read off the upper convex hull of
// (j, ln|c_j|).
std::vector<cplx> newton_polygon_start(const std::vector<cplx>& c) {
  const int d = static_cast<int>(c.size()) - 1;
  std::vector<int> hull;
  std::vector<double> lc(d + 1);
  for (int j = 0; j <= d; ++j) lc[j] = c[j] == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::abs(c[j]));
  for (int j = 0; j <= d; ++j) {
    if (!std::isfinite(lc[j])) continue;
    while (hull.size() >= 2) {
      const int a = hull[hull.size() - 2], b = hull.back();
      // Remove b if it lies on or below the segment a-j.
      const double cross = (lc[b] - lc[a]) * (j - a) - (lc[j] - lc[a]) * (b - a);
      if (cross <= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(j);
  }
  std::vector<cplx> z;
  z.reserve(d);
  const double sigma = 0.7;
  for (std::size_t e = 0; e + 1 < hull.size(); ++e) {
    const int a = hull[e], b = hull[e + 1];
    const int m = b - a;
    const double radius = std::exp((lc[a] - lc[b]) / m);
    for (int i = 0; i < m; ++i) {
      const double angle = 2.0 * std::numbers::pi * i / m + 2.0 * std::numbers::pi * e / d + sigma;
      z.push_back(std::polar(radius, angle));
    }
  }
  return z;
}

std::vector<cplx> aberth(const std::vector<cplx>& c, const RootOptions& opt, bool& ok) {
  const int d = static_cast<int>(c.size()) - 1;
  std::vector<double> abs_c(d + 1);
  for (int j = 0; j <= d; ++j) abs_c[j] = std::abs(c[j]);
  std::vector<cplx> z = newton_polygon_start(c);
  std::vector<char> done(d, 0);
  int remaining = d;
  for (int it = 0; it < opt.max_iterations && remaining > 0; ++it) {
    for (int i = 0; i < d; ++i) {
      if (done[i]) continue;
      const Evaluation ev = evaluate(c, abs_c, z[i]);
      if (ev.converged || !std::isfinite(ev.ratio.real()) || !std::isfinite(ev.ratio.imag())) {
        done[i] = 1;
        --remaining;
        continue;
      }
      cplx sum = 0.0;
      for (int j = 0; j < d; ++j)
        if (j != i) sum += 1.0 / (z[i] - z[j]);
      const cplx step = ev.ratio / (1.0 - ev.ratio * sum);
      z[i] -= step;
      if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(z[i])) {
        done[i] = 1;
        --remaining;
      }
    }
  }
  ok = remaining == 0;
  for (const cplx& root : z)
    if (!std::isfinite(root.real()) || !std::isfinite(root.imag())) ok = false;
  return z;
}

}  // namespace

double root_residual(const std::vector<cplx>& coefficients, cplx z) {
  std::vector<double> abs_c(coefficients.size());
  for (std::size_t j = 0; j < coefficients.size(); ++j) abs_c[j] = std::abs(coefficients[j]);
  const Evaluation ev = evaluate(coefficients, abs_c, z);
  return std::abs(ev.ratio) / std::max(1.0, std::abs(z));
}

std::vector<cplx> companion_roots(const std::vector<cplx>& coefficients) {
  const int d = static_cast<int>(coefficients.size()) - 1;
  if (d < 1) return {};
  if (coefficients[d] == 0.0) throw DegreeError("companion_roots: zero leading coefficient");
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) comp(i, d - 1) = -coefficients[i] / coefficients[d];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, false);
  if (solver.info() != Eigen::Success) throw IterationError("companion_roots: eigen solver failed", 0.0);
  std::vector<cplx> roots(solver.eigenvalues().data(), solver.eigenvalues().data() + d);
  return roots;
}

std::vector<cplx> poly_roots(const std::vector<cplx>& coefficients, const RootOptions& options) {
  if (coefficients.empty()) throw DegreeError("poly_roots: empty coefficient list");
  if (coefficients.back() == 0.0) throw DegreeError("poly_roots: zero leading coefficient");
  double scale = 0.0;
  for (const cplx& c : coefficients) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw DomainError("poly_roots: non-finite coefficient");
    scale = std::max(scale, std::abs(c));
  }
  std::size_t zeros = 0;
  while (coefficients[zeros] == 0.0) ++zeros;
  std::vector<cplx> c(coefficients.begin() + static_cast<long>(zeros), coefficients.end());
  for (cplx& v : c) v /= scale;
  std::vector<cplx> roots(zeros, cplx(0.0, 0.0));
  const int d = static_cast<int>(c.size()) - 1;
  if (d == 0) return roots;
  if (d == 1) {
    roots.push_back(-c[0] / c[1]);
    return roots;
  }
  bool ok = false;
  std::vector<cplx> found = aberth(c, options, ok);
  double worst = 0.0;
  if (ok)
    for (const cplx& z : found) worst = std::max(worst, root_residual(c, z));
  if (!ok || worst > options.residual_tolerance) {
    if (d > options.companion_fallback_degree)
      throw IterationError("poly_roots: Aberth iteration did not converge", worst);
    found = companion_roots(c);
    worst = 0.0;
    for (const cplx& z : found) worst = std::max(worst, root_residual(c, z));
    if (worst > options.residual_tolerance)
      throw IterationError("poly_roots: companion fallback residual too large", worst);
  }
  roots.insert(roots.end(), found.begin(), found.end());
  return roots;
}

}  // namespace semipos
