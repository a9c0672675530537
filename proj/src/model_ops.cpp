#include "semipos/model_ops.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "semipos/errors.hpp"
#include "semipos/numerics/special.hpp"
#include "semipos/numerics/stats.hpp"
#include "semipos/numerics/sturm_liouville.hpp"
#include "semipos/numerics/tridiag.hpp"

namespace semipos {

namespace {

constexpr double kPi = std::numbers::pi;
// Accumulated WKB action past the turning point; e^{−2·36} ≈ 1e-31 in |u|².
constexpr double kDecayAction = 36.0;

// March from `start` in direction dir until V exceeds E and the decay
// action beyond that point reaches kDecayAction. V must eventually grow.
double march_cutoff(const std::function<double(double)>& V, double start, double E, double step, int dir,
                    double limit = std::numeric_limits<double>::infinity()) {
  double x = start;
  for (int i = 0; i < 10000000 && V(x) <= E; ++i) {
    x += dir * step;
    if (std::abs(x) > limit) return dir * limit;
  }
  double action = 0.0;
  for (int i = 0; i < 10000000 && action < kDecayAction; ++i) {
    const double v = V(x);
    action += std::sqrt(std::max(v - E, 0.0)) * step;
    x += dir * step;
    if (std::abs(x) > limit) return dir * limit;
    // Past the turning point the potential grows quickly; lengthen the step.
    if (i % 64 == 63) step *= 1.25;
  }
  return x;
}

struct RadialDomain {
  double inner, outer;
};

// Radial sector grid on [inner, outer]; inner = 0 gives the regular origin,
// inner > 0 a Dirichlet wall deep inside the centrifugal barrier.
SymmetricTridiagonal radial_sector(const ModelOperator& op, int m, const RadialDomain& dom, int n) {
  const double h = (dom.outer - dom.inner) / n;
  std::vector<double> pf(n + 1), q(n), w(n);
  for (int i = 0; i <= n; ++i) pf[i] = dom.inner + i * h;
  for (int i = 0; i < n; ++i) {
    const double rho = dom.inner + (i + 0.5) * h;
    q[i] = op.potential(m, rho) * rho;
    w[i] = rho;
  }
  return assemble_sturm_liouville(pf, q, w, h);
}

// Radial interval for sector m resolving energies up to E.
RadialDomain radial_cutoff(const ModelOperator& op, int m, double E) {
  const double l = op.length_scale();
  const int r = op.r;
  // Beyond rho_mono the sector potential is increasing; below it, for
  // m != 0, it decreases towards the centrifugal wall.
  double rho_mono;
  if (m > 0) {
    rho_mono = std::pow(r * m / op.B0, 1.0 / r);
  } else {
    rho_mono = std::pow(std::abs(m) * r / ((r - 1) * op.B0), 1.0 / r);
  }
  rho_mono = std::max(rho_mono, 1e-3 * l);
  auto V = [&](double rho) { return op.potential(m, rho); };
  RadialDomain dom{0.0, march_cutoff(V, rho_mono, E, l / 100.0, +1)};
  if (m != 0) {
    const double in = march_cutoff(V, rho_mono, E, l / 100.0, -1, rho_mono);
    // Keep the origin when the barrier is thin compared with the grid.
    if (in > 0.05 * l) dom.inner = in;
  }
  return dom;
}

int resolved_nodes(int base, double L, double scale, double E) {
  const double by_scale = 40.0 * L / scale;
  const double by_wave = 10.0 * L * std::sqrt(std::max(E, 0.0));
  return static_cast<int>(std::max<double>(base, std::ceil(std::max(by_scale, by_wave))));
}

ExtrapolatedValues extrapolate_until_converged(const std::function<std::vector<double>(int)>& solve, int n0,
                                               const ModelGrid& grid) {
  return extrapolate_refinement(solve, n0, grid.tolerance, grid.max_refinements);
}

double montgomery_g(int r, double c, double x) { return c * std::pow(std::abs(x), r - 1) / (r - 1) * ((r % 2 == 0 && x < 0) ? -1.0 : 1.0); }

double montgomery_ginv(int r, double c, double y) {
  // Inverse of |x|^{r−1} branch on x ≥ 0, extended as an odd function.
  const double v = std::pow((r - 1) * std::abs(y) / c, 1.0 / (r - 1));
  return y < 0 ? -v : v;
}

struct MontgomeryDomain {
  double lo, hi;
};

MontgomeryDomain montgomery_domain(int r, double c, double eta, double E) {
  const double l = std::pow(c, -1.0 / r);
  auto V = [&](double x) {
    const double d = eta - montgomery_g(r, c, x);
    return d * d;
  };
  const double s = std::sqrt(std::max(E, 0.0));
  double lo, hi;
  if (r % 2 == 0) {
    lo = montgomery_ginv(r, c, eta - s);
    hi = montgomery_ginv(r, c, eta + s);
  } else {
    const double top = eta + s;
    const double x = top > 0 ? montgomery_ginv(r, c, top) : 0.0;
    lo = -x;
    hi = x;
  }
  const double step = l / 100.0;
  lo = march_cutoff(V, lo, E, step, -1);
  hi = march_cutoff(V, hi, E, step, +1);
  return {lo, hi};
}

SymmetricTridiagonal montgomery_matrix(int r, double c, double eta, const MontgomeryDomain& dom, int n) {
  const double h = (dom.hi - dom.lo) / n;
  std::vector<double> pf(n + 1, 1.0), q(n), w(n, 1.0);
  for (int i = 0; i < n; ++i) {
    const double x = dom.lo + (i + 0.5) * h;
    const double d = eta - montgomery_g(r, c, x);
    q[i] = d * d;
  }
  return assemble_sturm_liouville(pf, q, w, h);
}

}  // namespace

void ModelOperator::validate() const {
  if (r < 2) throw DomainError("ModelOperator: r must be >= 2");
  if (!(B0 > 0.0) || !std::isfinite(B0)) throw DomainError("ModelOperator: B0 must be positive");
}

double ModelOperator::field(double rho) const { return B0 * std::pow(rho, r - 2); }
double ModelOperator::flux(double rho) const { return B0 * std::pow(rho, r) / r; }
double ModelOperator::weight(double rho) const { return 2.0 * B0 * std::pow(rho, r) / (r * r); }
double ModelOperator::length_scale() const { return std::pow(B0, -1.0 / r); }

double ModelOperator::potential(int m, double rho) const {
  const double d = (m - flux(rho)) / rho;
  return d * d - (flavor == ModelFlavor::kodaira ? field(rho) : 0.0);
}

double model_basis_norm(int r, double B0, int alpha) {
  if (r < 2) throw DomainError("model_basis_norm: r must be >= 2");
  if (!(B0 > 0.0)) throw DomainError("model_basis_norm: B0 must be positive");
  if (alpha < 0) throw DomainError("model_basis_norm: alpha must be non-negative");
  const double e = (2.0 * alpha + 2.0) / r;
  return std::exp(std::log(2.0 * kPi / r) + log_gamma(e) + e * std::log(r * r / (2.0 * B0)));
}

double model_kernel_diag(int r, double B0) {
  if (r < 2 || r % 2 != 0) throw DomainError("model_kernel_diag: r must be even and >= 2");
  return 1.0 / model_basis_norm(r, B0, 0);
}

double model_kernel_diag_printed(int r, double B0) {
  if (r < 2 || r % 2 != 0) throw DomainError("model_kernel_diag_printed: r must be even and >= 2");
  return r / (2.0 * kPi) * std::pow(4.0 * B0 / (r * r), 2.0 / r) / std::exp(log_gamma(2.0 / r));
}

ExtrapolatedValues model_sector_eigenvalues(const ModelOperator& op, int m, int count, const ModelGrid& grid) {
  op.validate();
  if (count < 1) throw DomainError("model_sector_eigenvalues: count must be positive");
  const double scale = op.length_scale();
  double E = std::pow(op.B0, 2.0 / op.r) * (4.0 * count + 2.0) * std::pow(1.0 + std::abs(m), 1.0 - 2.0 / op.r);
  for (int attempt = 0; attempt < 40; ++attempt) {
    const RadialDomain dom = radial_cutoff(op, m, E);
    const int n0 = resolved_nodes(grid.nodes, dom.outer - dom.inner, scale, E);
    auto solve = [&](int n) {
      return tridiag_eigenvalues(radial_sector(op, m, dom, n), EigenSelection::lowest(count));
    };
    ExtrapolatedValues ev = extrapolate_until_converged(solve, n0, grid);
    if (ev.values.back() <= 0.5 * E) return ev;
    E = 2.0 * ev.values.back();
  }
  throw ConvergenceError("model_sector_eigenvalues: energy window did not settle", E, 0.0);
}

Lambda0Result model_bochner_lambda0(int r, double B0, const ModelGrid& grid) {
  ModelOperator op{r, B0, ModelFlavor::bochner};
  op.validate();
  Lambda0Result best;
  best.value = std::numeric_limits<double>::infinity();
  // Sector ground energies are unimodal in m (audited in the tests); scan
  // both directions until three consecutive sectors fail to improve on the
  // best value by more than its error estimate. At r = 2 every m >= 0 sector
  // carries the same Landau level, which this rule also terminates.
  for (int dir : {+1, -1}) {
    int stale = 0;
    for (int step = 0; step < 10000 && stale < 3; ++step) {
      const int m = dir > 0 ? step : -1 - step;
      const ExtrapolatedValues ev = model_sector_eigenvalues(op, m, 1, grid);
      const double v = ev.values[0];
      if (v < best.value - 2.0 * std::max(ev.errors[0], best.error)) {
        best.value = v;
        best.error = ev.errors[0];
        best.sector = m;
        best.nodes = ev.nodes;
        stale = 0;
      } else {
        ++stale;
      }
    }
  }
  return best;
}

std::vector<SectorTable> model_spectrum_below(int r, double B0, double E, const ModelGrid& grid) {
  ModelOperator op{r, B0, ModelFlavor::bochner};
  op.validate();
  if (r == 2) throw UnsupportedError("model spectrum: r = 2 has infinitely degenerate Landau levels");
  std::vector<SectorTable> table;
  const double scale = op.length_scale();
  for (int dir : {+1, -1}) {
    int above = 0;
    double previous = -std::numeric_limits<double>::infinity();
    for (int step = 0; step < 100000; ++step) {
      const int m = dir > 0 ? step : -1 - step;
      const double ground = model_sector_eigenvalues(op, m, 1, grid).values[0];
      if (ground >= E) {
        above = (ground > previous) ? above + 1 : 0;
        previous = ground;
        if (above >= 3) break;
        continue;
      }
      above = 0;
      previous = ground;
      const RadialDomain dom = radial_cutoff(op, m, 2.0 * E);
      const int n = resolved_nodes(grid.nodes, dom.outer - dom.inner, scale, 2.0 * E);
      const int count = radial_sector(op, m, dom, 2 * n).count_below(E);
      SectorTable row{m, model_sector_eigenvalues(op, m, std::max(count, 1), grid).values};
      row.values.erase(std::remove_if(row.values.begin(), row.values.end(), [E](double v) { return v >= E; }),
                       row.values.end());
      table.push_back(std::move(row));
    }
  }
  std::sort(table.begin(), table.end(), [](const SectorTable& a, const SectorTable& b) { return a.m < b.m; });
  return table;
}

long model_counting(int r, double B0, double c1, double c2, const ModelGrid& grid) {
  if (r == 2) throw UnsupportedError("model_counting: r = 2 has infinitely degenerate Landau levels");
  if (!(c2 > c1)) throw DomainError("model_counting: need c1 < c2");
  // Include one extra eigenvalue per sector above c2 to audit the margin.
  const double E = c2 * (1.0 + 4.0 * grid.margin) + 1e-12;
  const auto table = model_spectrum_below(r, B0, E, grid);
  long count = 0;
  for (const auto& row : table) {
    for (double v : row.values) {
      for (double c : {c1, c2}) {
        if (std::abs(v - c) <= grid.margin * std::max(std::abs(c), 1e-12))
          throw IllConditionedWindow("model_counting: window endpoint within margin of a model eigenvalue");
      }
      if (v >= c1 && v < c2) ++count;
    }
  }
  return count;
}

double montgomery_ground(int r, double c, double eta, const ModelGrid& grid) {
  if (r < 2) throw DomainError("montgomery: r must be >= 2");
  if (!(c > 0.0)) throw DomainError("montgomery: c must be positive");
  const double scale = std::pow(c, -1.0 / r);
  double E = 4.0 * std::pow(c, 2.0 / r) + eta * eta;
  for (int attempt = 0; attempt < 60; ++attempt) {
    const MontgomeryDomain dom = montgomery_domain(r, c, eta, E);
    const int n0 = resolved_nodes(grid.nodes, dom.hi - dom.lo, scale, E);
    auto solve = [&](int n) { return tridiag_eigenvalues(montgomery_matrix(r, c, eta, dom, n), EigenSelection::lowest(1)); };
    const ExtrapolatedValues ev = extrapolate_until_converged(solve, n0, grid);
    if (ev.values[0] <= 0.5 * E) return ev.values[0];
    E = 2.0 * ev.values[0];
  }
  throw ConvergenceError("montgomery_ground: energy window did not settle", E, 0.0);
}

double montgomery_lambda0(int r, double c, const ModelGrid& grid, double* argmin) {
  if (r == 2) {
    if (argmin) *argmin = 0.0;
    return montgomery_ground(r, c, 0.0, grid);
  }
  const double s = std::pow(c, 1.0 / r);
  // Coarse scan in natural units, then golden-section refinement.
  double best_eta = 0.0, best = std::numeric_limits<double>::infinity();
  ModelGrid coarse = grid;
  coarse.tolerance = std::max(grid.tolerance, 1e-7);
  for (int i = 0; i <= 60; ++i) {
    const double eta = s * (-2.0 + 0.1 * i);
    const double v = montgomery_ground(r, c, eta, coarse);
    if (v < best) {
      best = v;
      best_eta = eta;
    }
  }
  double fmin = 0.0;
  const double eta = golden_section_minimize([&](double e) { return montgomery_ground(r, c, e, grid); },
                                             best_eta - 0.1 * s, best_eta + 0.1 * s, 1e-7 * s, &fmin);
  if (argmin) *argmin = eta;
  return fmin;
}

int montgomery_count_below(int r, double c, double eta, double E, int nodes) {
  const double scale = std::pow(c, -1.0 / r);
  const MontgomeryDomain dom = montgomery_domain(r, c, eta, E);
  int n = resolved_nodes(nodes, dom.hi - dom.lo, scale, E);
  int previous = montgomery_matrix(r, c, eta, dom, n).count_below(E);
  for (int level = 0; level < 6; ++level) {
    n *= 2;
    const int current = montgomery_matrix(r, c, eta, dom, n).count_below(E);
    if (current == previous) return current;
    previous = current;
  }
  throw ConvergenceError("montgomery_count_below: count not stable under refinement", previous, 0.0);
}

namespace {

// ∫ #(η, E) dη over the support of the count, by a grid scan with
// bisection at the jumps.
double integrated_count_below(int r, double c, double E, int nodes) {
  if (E <= 0.0) return 0.0;
  const double s = std::pow(c, 1.0 / r);
  const double d_eta = 0.02 * s;
  auto count = [&](double eta) { return montgomery_count_below(r, c, eta, E, nodes); };
  std::function<double(double, int, double, int)> piece = [&](double a, int ca, double b, int cb) -> double {
    if (ca == cb) return ca * (b - a);
    if (b - a < 1e-10 * s) return 0.5 * (ca + cb) * (b - a);
    const double mid = 0.5 * (a + b);
    const int cm = count(mid);
    return piece(a, ca, mid, cm) + piece(mid, cm, b, cb);
  };
  auto scan = [&](double start, int dir) {
    double total = 0.0;
    double eta = start;
    int c_eta = count(eta);
    int zeros = c_eta == 0 ? 1 : 0;
    bool seen = c_eta > 0;
    for (int i = 0; i < 1000000; ++i) {
      const double next = eta + dir * d_eta;
      const int c_next = count(next);
      total += dir > 0 ? piece(eta, c_eta, next, c_next) : piece(next, c_next, eta, c_eta);
      eta = next;
      c_eta = c_next;
      seen = seen || c_eta > 0;
      zeros = c_eta == 0 ? zeros + 1 : 0;
      // Stop after the support has been crossed and a long zero stretch follows.
      if (seen && zeros > 200) break;
      if (!seen && zeros > 20000) break;
    }
    return total;
  };
  if (r % 2 == 0) {
    // #(−η) = #(η) by the symmetry x ↦ −x.
    return 2.0 * scan(0.0, +1);
  }
  // Odd r: the count vanishes for η ≤ −√E.
  const double start = -std::sqrt(E) - d_eta;
  return scan(start, +1);
}

}  // namespace

double montgomery_integrated_count(int r, double c, double a, double b, int nodes) {
  if (r == 2) throw UnsupportedError("montgomery_integrated_count: r = 2 band is flat; the integral diverges");
  if (!(b > a)) throw DomainError("montgomery_integrated_count: need a < b");
  return integrated_count_below(r, c, b, nodes) - integrated_count_below(r, c, a, nodes);
}

double mehler_heat_diag(double B, double t) {
  if (!(t > 0.0)) throw DomainError("mehler_heat_diag: t must be positive");
  return B / (4.0 * kPi * std::sinh(B * t));
}

double model_heat_diag(int r, double B0, double t, const ModelGrid& grid) {
  if (!(t > 0.0)) throw DomainError("model_heat_diag: t must be positive");
  ModelOperator op{r, B0, ModelFlavor::bochner};
  op.validate();
  const double scale = op.length_scale();
  const double lambda_min = model_sector_eigenvalues(op, 0, 1, grid).values[0];
  double E = lambda_min + 46.0 / t;
  for (int attempt = 0; attempt < 20; ++attempt) {
    const RadialDomain dom = radial_cutoff(op, 0, 1.5 * E);
    const int n0 = resolved_nodes(grid.nodes, dom.outer, scale, 1.5 * E);
    double last_term = 0.0, total_fine = 0.0;
    auto sum_at = [&](int n) {
      const SymmetricTridiagonal T = radial_sector(op, 0, dom, n);
      const TridiagEigen eig = tridiag_eigen(T, EigenSelection::window(-1e300, E));
      double sum = 0.0;
      last_term = 0.0;
      for (std::size_t j = 0; j < eig.values.size(); ++j) {
        const auto& u = eig.vectors[j];
        const double u0 = extrapolate_left(u[0], u[1], u[2]);
        const double term = std::exp(-t * eig.values[j]) * u0 * u0 / (2.0 * kPi);
        sum += term;
        last_term = term;
      }
      total_fine = sum;
      return std::vector<double>{sum};
    };
    ModelGrid heat_grid = grid;
    heat_grid.tolerance = grid.heat_tolerance;
    const ExtrapolatedValues ev = extrapolate_until_converged(sum_at, n0, heat_grid);
    if (last_term <= 1e-14 * total_fine) return ev.values[0];
    E *= 1.5;
  }
  throw ConvergenceError("model_heat_diag: spectral tail not controlled", 0.0, 0.0);
}

HeatBottomProbe large_time_heat_probe(int r, double B0, double epsilon, const ModelGrid& grid) {
  ModelOperator op{r, B0, ModelFlavor::bochner};
  op.validate();
  const Lambda0Result l0 = model_bochner_lambda0(r, B0, grid);
  const double scale = op.length_scale();
  HeatBottomProbe probe;
  probe.lambda0 = l0.value;
  probe.ratio = std::numeric_limits<double>::infinity();
  for (double t_units : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
    const double t = t_units / l0.value;
    const double E = l0.value + 40.0 / t;
    for (double R_units : {2.0, 4.0, 8.0}) {
      const double R = R_units * scale;
      double num = 0.0, den = 0.0;
      for (int dir : {+1, -1}) {
        int above = 0;
        for (int step = 0; step < 100000; ++step) {
          const int m = dir > 0 ? step : -1 - step;
          const RadialDomain dom = radial_cutoff(op, m, 1.5 * E);
          const int n = resolved_nodes(grid.nodes, dom.outer - dom.inner, scale, 1.5 * E);
          const SymmetricTridiagonal T = radial_sector(op, m, dom, n);
          const TridiagEigen eig = tridiag_eigen(T, EigenSelection::window(-1e300, E));
          if (eig.values.empty()) {
            if (++above >= 3) break;
            continue;
          }
          above = 0;
          const double h = (dom.outer - dom.inner) / n;
          for (std::size_t j = 0; j < eig.values.size(); ++j) {
            double mass = 0.0;
            for (int i = 0; i < n && dom.inner + (i + 0.5) * h < R; ++i) {
              const double u = eig.vectors[j][i];
              mass += u * u * (dom.inner + (i + 0.5) * h) * h;
            }
            const double wgt = std::exp(-t * (eig.values[j] - l0.value)) * mass;
            num += eig.values[j] * wgt;
            den += wgt;
          }
        }
      }
      const double ratio = num / den;
      if (ratio < probe.ratio) {
        probe.t = t;
        probe.radius = R;
        probe.ratio = ratio;
      }
      if (ratio <= l0.value + epsilon) {
        probe.satisfied = true;
        probe.t = t;
        probe.radius = R;
        probe.ratio = ratio;
        return probe;
      }
    }
  }
  return probe;
}

}  // namespace semipos
