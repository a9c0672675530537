#include "semipos/numerics/sturm_liouville.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "semipos/errors.hpp"

namespace semipos {

SymmetricTridiagonal assemble_sturm_liouville(const std::vector<double>& p_faces, const std::vector<double>& q,
                                              const std::vector<double>& w, double h) {
  const std::size_t n = q.size();
  if (n == 0 || p_faces.size() != n + 1 || w.size() != n) throw ContractError("assemble_sturm_liouville: sizes");
  if (!(h > 0.0)) throw DomainError("assemble_sturm_liouville: spacing must be positive");
  std::vector<double> diag(n), off(n - 1), weight(n);
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = (p_faces[i] + p_faces[i + 1]) / h + q[i] * h;
    weight[i] = w[i] * h;
    if (i + 1 < n) off[i] = -p_faces[i + 1] / h;
  }
  return SymmetricTridiagonal(std::move(diag), std::move(off), std::move(weight));
}

double extrapolate_left(double u0, double u1, double u2) { return (15.0 * u0 - 10.0 * u1 + 3.0 * u2) / 8.0; }

double richardson(double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; }

ExtrapolatedValues extrapolate_refinement(const std::function<std::vector<double>(int)>& solve, int n0,
                                          double tolerance, int max_refinements, double floor) {
  int n = n0;
  std::vector<double> coarse = solve(n);
  const std::size_t m = coarse.size();
  std::vector<double> previous;
  double worst = std::numeric_limits<double>::infinity();
  for (int level = 1; level <= max_refinements; ++level) {
    n *= 2;
    std::vector<double> fine = solve(n);
    if (fine.size() != m) throw ContractError("extrapolate_refinement: solve changed its output length");
    ExtrapolatedValues out;
    out.nodes = n;
    out.values.resize(m);
    for (std::size_t i = 0; i < m; ++i) out.values[i] = richardson(coarse[i], fine[i]);
    if (!previous.empty()) {
      out.errors.resize(m);
      worst = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        out.errors[i] = std::abs(out.values[i] - previous[i]);
        worst = std::max(worst, out.errors[i] / std::max({std::abs(out.values[i]), floor, 1e-300}));
      }
      if (worst < tolerance) return out;
    }
    previous = out.values;
    coarse = std::move(fine);
  }
  throw ConvergenceError("grid refinement cap reached", worst, tolerance);
}

}  // namespace semipos
