#include "semipos/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <set>

#include "semipos/errors.hpp"
#include "semipos/numerics/special.hpp"
#include "semipos/numerics/stats.hpp"
#include "semipos/parallel.hpp"

namespace semipos {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
// WKB action past a turning point before a wall is placed; e^{−72} in |u|².
constexpr double kDecayAction = 36.0;

double energy_unit(const SurfaceModel& model, int k) { return std::pow(static_cast<double>(k), 2.0 / model.r()); }

void check_k(int k) {
  if (k <= 0) throw DomainError("spectral: k must be positive");
}

// m − k·a(θ), using the south-regular form on the southern half to keep
// the small difference accurate near θ = π.
double gauge_offset(const SurfaceModel& model, int k, int m, double theta) {
  if (theta <= 0.5 * kPi) return m - k * model.flux_theta(theta);
  double complement;
  if (model.kind() == SurfaceKind::cp1_semipositive) {
    const double t = t_of_theta(theta);
    complement = theta >= kPi ? 0.0 : 0.5 * model.r() / (1.0 + std::pow(t, model.r()));
  } else {
    complement = model.degree() - model.flux_theta(theta);
  }
  return (m - k * model.degree()) + k * complement;
}

// Intervals of θ on which the flux is monotone.
std::vector<std::pair<double, double>> monotone_pieces(const SurfaceModel& model) {
  if (model.kind() == SurfaceKind::circle_degenerate && model.r() % 2 == 1) return {{0.0, 0.5 * kPi}, {0.5 * kPi, kPi}};
  return {{0.0, kPi}};
}

// Minimizers of the Bochner sector potential: the roots of k·a(θ) = m on each
// monotone piece, or the interior minimum when m is outside the flux range.
std::vector<double> well_centres(const SurfaceModel& model, int k, int m) {
  std::vector<double> centres;
  for (const auto& [p0, p1] : monotone_pieces(model)) {
    auto g = [&](double th) { return gauge_offset(model, k, m, th); };
    const double g0 = g(p0), g1 = g(p1);
    if (g0 == 0.0) {
      centres.push_back(p0);
      continue;
    }
    if (g1 == 0.0) {
      centres.push_back(p1);
      continue;
    }
    if ((g0 < 0.0) != (g1 < 0.0)) {
      double lo = p0, hi = p1;
      for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        ((g(mid) < 0.0) == (g0 < 0.0) ? lo : hi) = mid;
      }
      centres.push_back(0.5 * (lo + hi));
      continue;
    }
    const double eps = 1e-9;
    double fmin = 0.0;
    const double c = golden_section_minimize(
        [&](double th) { return sector_potential(model, k, m, th, LaplacianKind::bochner); }, p0 + eps, p1 - eps,
        1e-12, &fmin);
    centres.push_back(c);
  }
  return centres;
}

// Walk from `start` while V ≤ E, then accumulate decay action R·√(V−E)
// until kDecayAction. Returns the stopping point; `hit` reports clamping at a pole.
double march(const std::function<double(double)>& V, double start, double E, double step, int dir, bool& hit) {
  const double R = reference_radius();
  hit = false;
  double x = start;
  auto clamp = [&](double y) {
    if (y <= 0.0) {
      hit = true;
      return 0.0;
    }
    if (y >= kPi) {
      hit = true;
      return kPi;
    }
    return y;
  };
  for (long i = 0; i < 100000000 && V(x) <= E; ++i) {
    x = clamp(x + dir * step);
    if (hit) return x;
  }
  double action = 0.0;
  for (long i = 0; i < 100000000 && action < kDecayAction; ++i) {
    action += R * std::sqrt(std::max(V(x) - E, 0.0)) * step;
    x = clamp(x + dir * step);
    if (hit) return x;
    if (i % 64 == 63) step *= 1.25;
  }
  return x;
}

int nodes_for(const SectorDomain& dom, double E, double K, int base) {
  const double L = reference_radius() * (dom.hi - dom.lo);
  const double n = 20.0 * L * std::sqrt(std::max(E, K));
  return static_cast<int>(std::min<double>(std::max<double>(base, std::ceil(n)), 1 << 22));
}

// Bochner potential and |τ| at the deepest well of sector m.
std::pair<double, double> well_bottom(const SurfaceModel& model, int k, int m) {
  double vmin = kInf, field = 0.0;
  for (double c : well_centres(model, k, m)) {
    const double v = sector_potential(model, k, m, c, LaplacianKind::bochner);
    if (v < vmin) {
      vmin = v;
      field = std::abs(model.field_theta(c));
    }
  }
  return {vmin, field};
}

// Size of the terms that cancel in a sector eigenvalue; Kodaira zero modes
// are only resolved to rounding relative to this.
double sector_scale(const SurfaceModel& model, int k, int m) {
  return energy_unit(model, k) + k * well_bottom(model, k, m).second;
}

// Initial energy window for the lowest `count` levels of sector m.
double initial_energy(const SurfaceModel& model, int k, int m, int count) {
  const auto [vmin, field] = well_bottom(model, k, m);
  return std::max(vmin, 0.0) + (2.0 * count + 1.0) * (k * field + 10.0 * energy_unit(model, k));
}

// Ordered outward scan m = start, start+dir, … in batches evaluated in
// parallel. `consume` sees results strictly in order and returns false to
// stop; results past the stopping point are discarded, so the outcome does
// not depend on the batch size.
template <class T>
void scan_outward(int start, int dir, const std::function<T(int)>& eval, const std::function<bool(int, T&)>& consume,
                  int limit = 1000000) {
  const int batch = std::max(1, thread_count());
  for (int offset = 0; offset < limit; offset += batch) {
    std::vector<T> results(batch);
    parallel_for(batch, [&](std::size_t j) { results[j] = eval(start + dir * (offset + static_cast<int>(j))); });
    for (int j = 0; j < batch; ++j) {
      if (!consume(start + dir * (offset + j), results[j])) return;
    }
  }
}

// Value of an eigenvector at θ0 in log form, interpolating between centres.
double log_abs_at(const RadialSectorOperator& op, const TridiagEigen& eig, std::size_t j, double theta0) {
  const auto& th = op.theta;
  const auto& la = eig.log_abs[j];
  const auto& sg = eig.signs[j];
  const std::size_t n = th.size();
  std::size_t i = static_cast<std::size_t>(std::clamp((theta0 - th[0]) / op.h, 0.0, static_cast<double>(n - 2)));
  const double f = std::clamp((theta0 - th[i]) / op.h, 0.0, 1.0);
  const double a = la[i], b = la[i + 1];
  if (a == -kInf && b == -kInf) return -kInf;
  if (sg[i] == sg[i + 1] && std::isfinite(a) && std::isfinite(b)) return a + (b - a) * f;
  const double M = std::max(a, b);
  const double v = sg[i] * std::exp(a - M) * (1.0 - f) + sg[i + 1] * std::exp(b - M) * f;
  return v == 0.0 ? -kInf : M + std::log(std::abs(v));
}

}  // namespace

double sector_potential(const SurfaceModel& model, int k, int m, double theta, LaplacianKind kind) {
  const double R = reference_radius();
  const double d = gauge_offset(model, k, m, theta);
  const double s = std::sin(theta);
  double v;
  if (theta <= 0.0 || theta >= kPi || s == 0.0) {
    v = std::abs(d) < 1e-12 * std::max(1.0, std::abs(static_cast<double>(m))) ? 0.0 : kInf;
  } else {
    v = d * d / (R * R * s * s);
  }
  if (kind == LaplacianKind::kodaira) v -= k * model.field_theta(std::clamp(theta, 0.0, kPi));
  return v;
}

SectorDomain sector_domain(const SurfaceModel& model, int k, int m, double E, LaplacianKind kind) {
  check_k(k);
  const double K = energy_unit(model, k);
  const double R = reference_radius();
  auto V = [&](double th) { return sector_potential(model, k, m, th, kind); };
  const double step = 1.0 / (100.0 * R * std::sqrt(std::max(E, K)));
  const auto centres = well_centres(model, k, m);
  SectorDomain dom{kPi, 0.0, false, false};
  bool any = false;
  double best_c = centres.front(), best_v = kInf;
  for (double c : centres) {
    const double v = V(c);
    if (v < best_v) {
      best_v = v;
      best_c = c;
    }
  }
  auto extend = [&](double c) {
    bool hit_lo = false, hit_hi = false;
    double lo = march(V, c, E, step, -1, hit_lo);
    double hi = march(V, c, E, step, +1, hit_hi);
    // A thin centrifugal barrier is kept in the grid, with the pole as a natural end.
    if (!hit_lo && c < 0.5 * kPi && lo < 0.05 * c) hit_lo = true;
    if (!hit_hi && c > 0.5 * kPi && kPi - hi < 0.05 * (kPi - c)) hit_hi = true;
    if (hit_lo) lo = 0.0;
    if (hit_hi) hi = kPi;
    if (lo < dom.lo) {
      dom.lo = lo;
      dom.natural_lo = hit_lo;
    }
    if (hi > dom.hi) {
      dom.hi = hi;
      dom.natural_hi = hit_hi;
    }
  };
  for (double c : centres) {
    if (V(c) <= E) {
      extend(c);
      any = true;
    }
  }
  if (!any) extend(best_c);
  return dom;
}

RadialSectorOperator assemble_sector(const SurfaceModel& model, int k, int m, const SectorDomain& domain, int n,
                                     LaplacianKind kind) {
  check_k(k);
  if (n < 3) throw DomainError("assemble_sector: need at least three cells");
  if (!(domain.hi > domain.lo)) throw DomainError("assemble_sector: empty domain");
  const double R = reference_radius();
  RadialSectorOperator op;
  op.k = k;
  op.m = m;
  op.kind = kind;
  op.domain = domain;
  op.h = (domain.hi - domain.lo) / n;
  std::vector<double> pf(n + 1), q(n), w(n);
  for (int i = 0; i <= n; ++i) pf[i] = std::sin(domain.lo + i * op.h);
  if (domain.natural_lo) pf[0] = 0.0;
  if (domain.natural_hi) pf[n] = 0.0;
  op.theta.resize(n);
  for (int i = 0; i < n; ++i) {
    const double th = domain.lo + (i + 0.5) * op.h;
    op.theta[i] = th;
    const double s = std::sin(th);
    q[i] = R * R * sector_potential(model, k, m, th, kind) * s;
    w[i] = R * R * s;
  }
  op.matrix = assemble_sturm_liouville(pf, q, w, op.h);
  return op;
}

double rayleigh_quotient(const RadialSectorOperator& op, const std::vector<double>& u) {
  const auto& S = op.matrix;
  if (static_cast<int>(u.size()) != S.size()) throw ContractError("rayleigh_quotient: size mismatch");
  const auto& d = S.diagonal();
  const auto& e = S.offdiagonal();
  const auto& w = S.weight();
  double num = 0.0, den = 0.0;
  for (int i = 0; i < S.size(); ++i) {
    num += d[i] * u[i] * u[i];
    if (i + 1 < S.size()) num += 2.0 * e[i] * u[i] * u[i + 1];
    den += w[i] * u[i] * u[i];
  }
  return num / den;
}

ExtrapolatedValues sector_eigenvalues(const SurfaceModel& model, int k, int m, int count, LaplacianKind kind,
                                      const ModelGrid& grid) {
  check_k(k);
  if (count < 1) throw DomainError("sector_eigenvalues: count must be positive");
  const double K = energy_unit(model, k);
  double E = initial_energy(model, k, m, count);
  for (int attempt = 0; attempt < 40; ++attempt) {
    const SectorDomain dom = sector_domain(model, k, m, E, kind);
    const int n0 = nodes_for(dom, E, K, grid.nodes);
    auto solve = [&](int n) {
      return tridiag_eigenvalues(assemble_sector(model, k, m, dom, n, kind).matrix, EigenSelection::lowest(count));
    };
    ExtrapolatedValues ev =
        extrapolate_refinement(solve, n0, grid.tolerance, grid.max_refinements, sector_scale(model, k, m));
    if (ev.values.back() <= 0.5 * E) return ev;
    E = std::max(2.0 * ev.values.back(), 2.0 * E);
  }
  throw ConvergenceError("sector_eigenvalues: energy window did not settle", E, 0.0);
}

std::vector<int> anchor_sectors(const SurfaceModel& model, int k) {
  check_k(k);
  std::vector<double> points;
  if (model.kind() == SurfaceKind::cp1_semipositive) {
    points = {0.0, kPi};
  } else {
    points = {0.5 * kPi};
  }
  std::vector<int> anchors;
  for (double th : points) {
    const int m = static_cast<int>(std::lround(k * model.flux_theta(th)));
    if (std::find(anchors.begin(), anchors.end(), m) == anchors.end()) anchors.push_back(m);
  }
  return anchors;
}

Lambda0Result lambda0(const SurfaceModel& model, int k, const ModelGrid& grid) {
  check_k(k);
  Lambda0Result best;
  best.value = kInf;
  std::set<int> visited;
  // Sector ground energies are unimodal away from each anchor; stop after
  // three consecutive sectors that do not improve the best value.
  for (int anchor : anchor_sectors(model, k)) {
    for (int dir : {+1, -1}) {
      int stale = 0;
      const int start = dir > 0 ? anchor : anchor - 1;
      scan_outward<ExtrapolatedValues>(
          start, dir,
          [&](int m) {
            if (visited.count(m)) return ExtrapolatedValues{};
            return sector_eigenvalues(model, k, m, 1, LaplacianKind::bochner, grid);
          },
          [&](int m, ExtrapolatedValues& ev) {
            if (!visited.insert(m).second || ev.values.empty()) return ++stale < 3;
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
            return stale < 3;
          });
    }
  }
  return best;
}

double lambda0_model_constant(const SurfaceModel& model) {
  if (model.kind() == SurfaceKind::cp1_semipositive)
    return model_bochner_lambda0(model.r(), jet_coefficient(model, Pole::north)).value;
  return montgomery_lambda0(model.r(), jet_coefficient(model, Pole::equator));
}

ExpansionProbe lambda0_expansion_probe(const std::vector<double>& ks, const std::vector<double>& values, int r,
                                       double C, double noise_floor) {
  if (ks.size() != values.size()) throw ContractError("lambda0_expansion_probe: size mismatch");
  if (ks.size() < 5) throw SampleError("lambda0_expansion_probe: need at least five values of k");
  ExpansionProbe out;
  std::vector<double> x, y;
  bool all_small = true;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double d = values[i] * std::pow(ks[i], -2.0 / r) - C;
    if (std::abs(d) > noise_floor * std::abs(C)) all_small = false;
    x.push_back(std::log(ks[i]));
    y.push_back(std::log(std::max(std::abs(d), 1e-300)));
  }
  if (all_small) {
    out.indeterminate = true;
    out.exponent = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const LinearFit fit = ols(x, y);
  out.exponent = fit.slope;
  out.max_residual = fit.max_residual;
  return out;
}

std::vector<SectorSpectrum> spectrum_below(const SurfaceModel& model, int k, double E, LaplacianKind kind,
                                           const ModelGrid& grid) {
  check_k(k);
  const double K = energy_unit(model, k);
  std::vector<SectorSpectrum> table;
  std::set<int> visited;
  struct Probe {
    bool skip = true;
    double ground = 0.0;
    SectorSpectrum row;
  };
  auto eval = [&](int m) {
    Probe p;
    if (visited.count(m)) return p;
    p.skip = false;
    p.ground = sector_eigenvalues(model, k, m, 1, kind, grid).values[0];
    p.row.m = m;
    if (p.ground >= E) return p;
    const SectorDomain dom = sector_domain(model, k, m, 2.0 * E, kind);
    const int n = nodes_for(dom, 2.0 * E, K, grid.nodes);
    const int count = assemble_sector(model, k, m, dom, 2 * n, kind).matrix.count_below(E);
    const ExtrapolatedValues ev = sector_eigenvalues(model, k, m, std::max(count, 1), kind, grid);
    for (std::size_t i = 0; i < ev.values.size(); ++i) {
      if (ev.values[i] < E) {
        p.row.values.push_back(ev.values[i]);
        p.row.errors.push_back(ev.errors[i]);
      }
    }
    return p;
  };
  for (int anchor : anchor_sectors(model, k)) {
    for (int dir : {+1, -1}) {
      int above = 0;
      double previous = -kInf;
      const int start = dir > 0 ? anchor : anchor - 1;
      scan_outward<Probe>(start, dir, eval, [&](int m, Probe& p) {
        if (p.skip || !visited.insert(m).second) return ++above < 3;
        if (p.ground >= E) {
          above = p.ground > previous ? above + 1 : 0;
          previous = p.ground;
          return above < 3;
        }
        above = 0;
        previous = p.ground;
        table.push_back(std::move(p.row));
        return true;
      });
    }
  }
  std::sort(table.begin(), table.end(), [](const SectorSpectrum& a, const SectorSpectrum& b) { return a.m < b.m; });
  return table;
}

long weyl_count(const SurfaceModel& model, int k, double c1, double c2, const ModelGrid& grid) {
  if (!(c2 > c1)) throw DomainError("weyl_count: need c1 < c2");
  const double K = energy_unit(model, k);
  const double lo = c1 * K, hi = c2 * K;
  const auto table = spectrum_below(model, k, hi * (1.0 + 4.0 * grid.margin) + 1e-12, LaplacianKind::bochner, grid);
  long count = 0;
  for (const auto& row : table) {
    for (double v : row.values) {
      for (double c : {lo, hi}) {
        if (std::abs(v - c) <= grid.margin * std::max(std::abs(c), 1e-12))
          throw IllConditionedWindow("weyl_count: window endpoint within margin of an eigenvalue");
      }
      if (v >= lo && v < hi) ++count;
    }
  }
  return count;
}

double weyl_prediction(const SurfaceModel& model, double c1, double c2) {
  if (model.kind() == SurfaceKind::cp1_semipositive) {
    if (model.r() == 2) throw UnsupportedError("weyl_prediction: no degeneracy points at r = 2");
    return 2.0 * model_counting(model.r(), jet_coefficient(model, Pole::north), c1, c2);
  }
  // Equator of length 2πR; angular momentum plays the role of the dual variable.
  return reference_radius() * montgomery_integrated_count(model.r(), jet_coefficient(model, Pole::equator), c1, c2);
}

KodairaSpectrum kodaira_spectrum(const SurfaceModel& model, int k, bool count_zero_modes, const ModelGrid& grid) {
  check_k(k);
  if (model.kind() != SurfaceKind::cp1_semipositive) throw DomainError("kodaira_spectrum: requires the cp1 model");
  const double K = energy_unit(model, k);
  const int D = model.r() * k / 2;
  const double tiny = 1e-3 * K;
  KodairaSpectrum out;
  out.first_positive = kInf;
  struct SectorLow {
    std::vector<double> values, errors;
  };
  auto solve = [&](int m) {
    const int count = (m >= 0 && m <= D) ? 2 : 1;
    const ExtrapolatedValues ev = sector_eigenvalues(model, k, m, count, LaplacianKind::kodaira, grid);
    return SectorLow{ev.values, ev.errors};
  };
  auto absorb = [&](int m, const SectorLow& s) {
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      const double v = s.values[i];
      out.most_negative = std::min(out.most_negative, v);
      if (v > tiny && v < out.first_positive) {
        out.first_positive = v;
        out.first_positive_error = s.errors[i];
        out.first_positive_sector = m;
      }
    }
  };
  auto sector_positive = [&](const SectorLow& s) {
    double p = kInf;
    for (double v : s.values)
      if (v > tiny) p = std::min(p, v);
    return p;
  };
  std::vector<SectorLow> inside;
  if (count_zero_modes) {
    inside.resize(D + 1);
    parallel_for(D + 1, [&](std::size_t m) { inside[m] = solve(static_cast<int>(m)); });
    for (int m = 0; m <= D; ++m) absorb(m, inside[m]);
  }
  // Sectors outside [0, D] carry no holomorphic section; their energies grow
  // away from the poles. Inside, only sectors near the poles can hold the gap.
  std::set<int> visited;
  if (count_zero_modes)
    for (int m = 0; m <= D; ++m) visited.insert(m);
  for (int anchor : {0, D}) {
    for (int dir : {+1, -1}) {
      int stale = 0;
      const int start = dir > 0 ? anchor : anchor - 1;
      scan_outward<SectorLow>(
          start, dir,
          [&](int m) { return visited.count(m) ? SectorLow{} : solve(m); },
          [&](int m, SectorLow& s) {
            if (!visited.insert(m).second || s.values.empty()) return ++stale < 3;
            const double before = out.first_positive;
            absorb(m, s);
            stale = (out.first_positive < before || sector_positive(s) < 2.0 * out.first_positive) ? 0 : stale + 1;
            return stale < 3;
          });
    }
  }
  if (out.most_negative < -1e-6 * K)
    throw ConsistencyError("kodaira_spectrum: 2□ has a negative eigenvalue; assembly is inconsistent");
  if (count_zero_modes) {
    long zeros = 0;
    for (int m = 0; m <= D; ++m)
      for (double v : inside[m].values)
        if (v < 0.5 * out.first_positive) ++zeros;
    out.zero_modes = zeros;
  } else {
    out.zero_modes = -1;
  }
  return out;
}

Concentration ground_state_concentration(const SurfaceModel& model, int k, double radius, const ModelGrid& grid) {
  check_k(k);
  if (model.kind() == SurfaceKind::cp1_semipositive && model.r() == 2)
    throw UnsupportedError("ground_state_concentration: no degeneracy points at r = 2");
  if (!(radius > 0.0)) throw DomainError("ground_state_concentration: radius must be positive");
  const double K = energy_unit(model, k);
  const double R = reference_radius();
  const Lambda0Result l0 = lambda0(model, k, grid);
  const int m = l0.sector;
  auto V = [&](double th) { return sector_potential(model, k, m, th, LaplacianKind::bochner); };
  // Outside region in θ.
  double out_lo, out_hi;
  if (model.kind() == SurfaceKind::cp1_semipositive) {
    if (radius >= 1.0) throw DomainError("ground_state_concentration: radius must be below 1 for cp1");
    out_lo = theta_of_t(radius);
    out_hi = theta_of_t(1.0 / radius);
  } else {
    if (radius >= 0.5 * kPi) throw DomainError("ground_state_concentration: radius must be below π/2");
    out_lo = 0.5 * kPi - radius;
    out_hi = 0.5 * kPi + radius;
  }
  SectorDomain dom = sector_domain(model, k, m, 2.0 * l0.value, LaplacianKind::bochner);
  const double step = 1.0 / (100.0 * R * std::sqrt(std::max(l0.value, K)));
  bool hit = false;
  // Carry the grid a further decay action past the edge of every neighbourhood it touches.
  if (model.kind() == SurfaceKind::cp1_semipositive) {
    if (dom.hi < out_hi && dom.lo < out_lo) {
      const double ext = march(V, std::max(out_lo, dom.hi), l0.value, step, +1, hit);
      if (ext > dom.hi) {
        dom.hi = ext;
        dom.natural_hi = hit;
      }
    }
    if (dom.lo > out_lo && dom.hi > out_hi) {
      const double ext = march(V, std::min(out_hi, dom.lo), l0.value, step, -1, hit);
      if (ext < dom.lo) {
        dom.lo = ext;
        dom.natural_lo = hit;
      }
    }
  } else {
    const double lo_ext = march(V, std::min(out_lo, dom.lo), l0.value, step, -1, hit);
    if (lo_ext < dom.lo) {
      dom.lo = lo_ext;
      dom.natural_lo = hit;
    }
    const double hi_ext = march(V, std::max(out_hi, dom.hi), l0.value, step, +1, hit);
    if (hi_ext > dom.hi) {
      dom.hi = hi_ext;
      dom.natural_hi = hit;
    }
  }
  double vmax = l0.value;
  for (int i = 1; i < 1000; ++i) {
    const double v = V(dom.lo + (dom.hi - dom.lo) * i / 1000.0);
    if (std::isfinite(v)) vmax = std::max(vmax, v);
  }
  const int n = static_cast<int>(std::min<double>(
      std::max<double>(nodes_for(dom, 2.0 * l0.value, K, grid.nodes), std::ceil(2.0 * R * (dom.hi - dom.lo) * std::sqrt(vmax))),
      1 << 22));
  const RadialSectorOperator op = assemble_sector(model, k, m, dom, n, LaplacianKind::bochner);
  const TridiagEigen eig = tridiag_eigen(op.matrix, EigenSelection::lowest(1));
  const auto& w = op.matrix.weight();
  double log_mass = -kInf;
  for (int i = 0; i < n; ++i) {
    const double th = op.theta[i];
    const bool inside_hood = model.kind() == SurfaceKind::cp1_semipositive ? (th < out_lo || th > out_hi)
                                                                             : (th > out_lo && th < out_hi);
    if (!inside_hood) log_mass = log_add(log_mass, 2.0 * eig.log_abs[0][i] + std::log(w[i]));
  }
  Concentration c;
  c.sector = m;
  c.log_mass = log_mass;
  c.mass = std::exp(log_mass);
  return c;
}

namespace {

double pole_value(const TridiagEigen& eig, std::size_t j, bool north) {
  const auto& u = eig.vectors[j];
  const std::size_t n = u.size();
  return north ? extrapolate_left(u[0], u[1], u[2]) : extrapolate_left(u[n - 1], u[n - 2], u[n - 3]);
}

HeatDiagonal heat_at_pole(const SurfaceModel& model, int k, double time, bool north, const ModelGrid& grid) {
  const double K = energy_unit(model, k);
  const int m = static_cast<int>(std::lround(k * model.flux_theta(north ? 0.0 : kPi)));
  const double ground = sector_eigenvalues(model, k, m, 1, LaplacianKind::bochner, grid).values[0];
  double E = ground + 46.0 / time;
  for (int attempt = 0; attempt < 20; ++attempt) {
    const SectorDomain dom = sector_domain(model, k, m, 1.5 * E, LaplacianKind::bochner);
    if (!(north ? dom.natural_lo : dom.natural_hi)) throw ContractError("heat_diag: pole sector must reach the pole");
    const int n0 = nodes_for(dom, 1.5 * E, K, grid.nodes);
    double last_term = 0.0, total = 0.0;
    auto sum_at = [&](int n) {
      const RadialSectorOperator op = assemble_sector(model, k, m, dom, n, LaplacianKind::bochner);
      const TridiagEigen eig = tridiag_eigen(op.matrix, EigenSelection::window(-1e300, E));
      double sum = 0.0;
      last_term = 0.0;
      for (std::size_t j = 0; j < eig.values.size(); ++j) {
        const double u0 = pole_value(eig, j, north);
        const double term = std::exp(-time * (eig.values[j] - ground)) * u0 * u0 / (2.0 * kPi);
        sum += term;
        last_term = term;
      }
      total = sum;
      return std::vector<double>{sum};
    };
    const ExtrapolatedValues ev = extrapolate_refinement(sum_at, n0, grid.heat_tolerance, grid.max_refinements);
    if (last_term <= 1e-14 * total) {
      HeatDiagonal out;
      out.log_value = std::log(ev.values[0]) - time * ground;
      out.value = std::exp(out.log_value);
      out.log_error = ev.errors[0] / ev.values[0];
      out.sectors = 1;
      return out;
    }
    E = ground + 1.5 * (E - ground);
  }
  throw ConvergenceError("heat_diag: spectral tail not controlled", 0.0, 0.0);
}

struct SectorHeat {
  double ground = kInf;
  double estimate = -kInf;
  double log_value = -kInf;
  double log_error = 0.0;
};

// Ground energy on a single grid, no extrapolation; enough for screening.
double rough_ground(const SurfaceModel& model, int k, int m, const ModelGrid& grid) {
  const double K = energy_unit(model, k);
  double E = initial_energy(model, k, m, 1);
  for (int attempt = 0; attempt < 40; ++attempt) {
    const SectorDomain dom = sector_domain(model, k, m, E, LaplacianKind::bochner);
    const int n = nodes_for(dom, E, K, grid.nodes);
    const double v = tridiag_eigenvalue(assemble_sector(model, k, m, dom, n, LaplacianKind::bochner).matrix, 0);
    if (v <= 0.5 * E) return v;
    E = std::max(2.0 * v, 2.0 * E);
  }
  throw ConvergenceError("heat_diag: sector ground did not settle", E, 0.0);
}

// Agmon distance from θ0 to the nearest classically allowed point at energy λ.
double agmon_action(const SurfaceModel& model, int k, int m, double theta0, double lambda) {
  const double R = reference_radius();
  auto V = [&](double th) { return sector_potential(model, k, m, th, LaplacianKind::bochner); };
  if (V(theta0) <= lambda) return 0.0;
  double best = kInf;
  for (double c : well_centres(model, k, m)) {
    if (V(c) > lambda) continue;
    const int steps = 4000;
    const double dth = (c - theta0) / steps;
    double action = 0.0;
    for (int i = 0; i < steps; ++i) {
      const double v = V(theta0 + (i + 0.5) * dth);
      if (v <= lambda) break;
      action += R * std::sqrt(v - lambda) * std::abs(dth);
    }
    best = std::min(best, action);
  }
  return best;
}

double sector_log_heat(const SurfaceModel& model, int k, int m, double time, double theta0, double ground,
                       const ModelGrid& grid, double* error) {
  const double K = energy_unit(model, k);
  const double R = reference_radius();
  const double E = ground + 46.0 / time;
  auto V = [&](double th) { return sector_potential(model, k, m, th, LaplacianKind::bochner); };
  SectorDomain dom = sector_domain(model, k, m, 1.5 * E, LaplacianKind::bochner);
  // Cover θ0 with room for the wall to be irrelevant there.
  const double v0 = V(theta0);
  const double pad = 18.0 / (R * std::sqrt(std::max(v0 - E, K)));
  if (theta0 - pad < dom.lo) {
    dom.lo = std::max(0.0, theta0 - pad);
    dom.natural_lo = dom.lo == 0.0;
  }
  if (theta0 + pad > dom.hi) {
    dom.hi = std::min(kPi, theta0 + pad);
    dom.natural_hi = dom.hi == kPi;
  }
  // The value at θ0 is e^{−S} with S up to O(k); resolve the decay length
  // well enough that the h² error in S stays O(1e-3).
  const double vmax = std::max({v0, 1.5 * E, K});
  const int n0 = static_cast<int>(std::min<double>(
      std::max<double>(nodes_for(dom, 1.5 * E, K, grid.nodes), std::ceil(8.0 * R * (dom.hi - dom.lo) * std::sqrt(vmax))),
      1 << 20));
  auto log_sum = [&](int n) {
    const RadialSectorOperator op = assemble_sector(model, k, m, dom, n, LaplacianKind::bochner);
    const TridiagEigen eig = tridiag_eigen(op.matrix, EigenSelection::window(-1e300, E));
    double acc = -kInf;
    for (std::size_t j = 0; j < eig.values.size(); ++j)
      acc = log_add(acc, -time * eig.values[j] + 2.0 * log_abs_at(op, eig, j, theta0));
    return acc - std::log(2.0 * kPi);
  };
  const double l1 = log_sum(n0);
  const double l2 = log_sum(2 * n0);
  const double l4 = log_sum(4 * n0);
  if (!std::isfinite(l1) || !std::isfinite(l2) || !std::isfinite(l4)) {
    *error = 0.0;
    return l4;
  }
  const double extrapolated = richardson(l2, l4);
  *error = std::abs(extrapolated - richardson(l1, l2));
  return extrapolated;
}

}  // namespace

HeatDiagonal heat_diag(const SurfaceModel& model, int k, double t, double theta, const ModelGrid& grid) {
  check_k(k);
  if (!(t > 0.0)) throw DomainError("heat_diag: t must be positive");
  if (!(theta >= 0.0 && theta <= kPi)) throw DomainError("heat_diag: θ must lie in [0, π]");
  const double K = energy_unit(model, k);
  const double time = t / K;
  if (theta == 0.0 || theta == kPi) return heat_at_pole(model, k, time, theta == 0.0, grid);
  // Every sector reaches θ; screen with an Agmon bound before solving.
  const int m_lo = static_cast<int>(std::floor(k * model.flux_min())) - 20;
  const int m_hi = static_cast<int>(std::ceil(k * model.flux_max())) + 20;
  const int count = m_hi - m_lo + 1;
  std::vector<SectorHeat> sectors(count);
  parallel_for(count, [&](std::size_t i) {
    const int m = m_lo + static_cast<int>(i);
    SectorHeat& s = sectors[i];
    s.ground = rough_ground(model, k, m, grid);
    s.estimate = -time * s.ground - 2.0 * agmon_action(model, k, m, theta, s.ground);
  });
  double best = -kInf;
  for (const auto& s : sectors) best = std::max(best, s.estimate);
  const double keep_above = best - 60.0 - 2.0 * std::log(k + 1.0);
  std::vector<int> kept;
  for (int i = 0; i < count; ++i)
    if (sectors[i].estimate >= keep_above) kept.push_back(i);
  parallel_for(kept.size(), [&](std::size_t j) {
    SectorHeat& s = sectors[kept[j]];
    s.log_value = sector_log_heat(model, k, m_lo + kept[j], time, theta, s.ground, grid, &s.log_error);
  });
  HeatDiagonal out;
  out.log_value = -kInf;
  for (int i : kept) {
    out.log_value = log_add(out.log_value, sectors[i].log_value);
    out.log_error = std::max(out.log_error, sectors[i].log_error);
  }
  out.sectors = static_cast<int>(kept.size());
  out.value = std::exp(out.log_value);
  return out;
}

}  // namespace semipos
