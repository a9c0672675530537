#include "semipos/numerics/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "semipos/errors.hpp"

namespace semipos {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

SymmetricTridiagonal::SymmetricTridiagonal(std::vector<double> diagonal, std::vector<double> offdiagonal,
                                           std::vector<double> weight)
    : diagonal_(std::move(diagonal)), offdiagonal_(std::move(offdiagonal)), weight_(std::move(weight)) {
  finish();
}

SymmetricTridiagonal::SymmetricTridiagonal(std::vector<double> diagonal, std::vector<double> offdiagonal)
    : diagonal_(std::move(diagonal)), offdiagonal_(std::move(offdiagonal)) {
  weight_.assign(diagonal_.size(), 1.0);
  finish();
}

SymmetricTridiagonal SymmetricTridiagonal::from_operator(const std::vector<double>& sub,
                                                         const std::vector<double>& diagonal,
                                                         const std::vector<double>& super,
                                                         const std::vector<double>& weight) {
  const std::size_t n = diagonal.size();
  if (n == 0 || weight.size() != n || sub.size() + 1 != n || super.size() + 1 != n)
    throw ContractError("SymmetricTridiagonal: inconsistent sizes");
  std::vector<double> s_diag(n), s_off(n - 1);
  for (std::size_t i = 0; i < n; ++i) s_diag[i] = weight[i] * diagonal[i];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double upper = weight[i] * super[i];
    const double lower = weight[i + 1] * sub[i];
    if (std::abs(upper - lower) > 1e-14 * std::max(std::abs(upper), std::abs(lower)))
      throw ContractError("SymmetricTridiagonal: operator is not self-adjoint for the given weight");
    s_off[i] = 0.5 * (upper + lower);
  }
  return SymmetricTridiagonal(std::move(s_diag), std::move(s_off), weight);
}

void SymmetricTridiagonal::finish() {
  const std::size_t n = diagonal_.size();
  if (n == 0) throw ContractError("SymmetricTridiagonal: empty operator");
  if (offdiagonal_.size() + 1 != n || weight_.size() != n)
    throw ContractError("SymmetricTridiagonal: inconsistent sizes");
  for (double w : weight_)
    if (!(w > 0.0) || !std::isfinite(w)) throw ContractError("SymmetricTridiagonal: weights must be positive");
  for (double d : diagonal_)
    if (!std::isfinite(d)) throw ContractError("SymmetricTridiagonal: non-finite diagonal");
  for (double e : offdiagonal_)
    if (!std::isfinite(e)) throw ContractError("SymmetricTridiagonal: non-finite offdiagonal");
  t_diag_.resize(n);
  t_off_.resize(n - 1);
  t_off_sq_.resize(n - 1);
  for (std::size_t i = 0; i < n; ++i) t_diag_[i] = diagonal_[i] / weight_[i];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    t_off_[i] = offdiagonal_[i] / std::sqrt(weight_[i] * weight_[i + 1]);
    t_off_sq_[i] = t_off_[i] * t_off_[i];
  }
  gersh_lo_ = std::numeric_limits<double>::infinity();
  gersh_hi_ = -gersh_lo_;
  for (std::size_t i = 0; i < n; ++i) {
    double radius = 0.0;
    if (i > 0) radius += std::abs(t_off_[i - 1]);
    if (i + 1 < n) radius += std::abs(t_off_[i]);
    gersh_lo_ = std::min(gersh_lo_, t_diag_[i] - radius);
    gersh_hi_ = std::max(gersh_hi_, t_diag_[i] + radius);
  }
}

int SymmetricTridiagonal::count_below(double x) const {
  const std::size_t n = t_diag_.size();
  const double tiny = kEps * std::max(norm(), std::numeric_limits<double>::min());
  int count = 0;
  double q = t_diag_[0] - x;
  if (q == 0.0) q = -tiny;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < n; ++i) {
    q = t_diag_[i] - x - t_off_sq_[i - 1] / q;
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

std::vector<double> SymmetricTridiagonal::apply(const std::vector<double>& u) const {
  const std::size_t n = diagonal_.size();
  if (u.size() != n) throw ContractError("SymmetricTridiagonal::apply: size mismatch");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = diagonal_[i] * u[i];
    if (i > 0) s += offdiagonal_[i - 1] * u[i - 1];
    if (i + 1 < n) s += offdiagonal_[i] * u[i + 1];
    out[i] = s / weight_[i];
  }
  return out;
}

namespace {

double bisect(const SymmetricTridiagonal& op, int j, double lo, double hi) {
  // Invariant: count_below(lo) <= j < count_below(hi).
  // Sturm counts on graded pencils resolve small eigenvalues well below
  // ε‖T‖, so the absolute floor only guards eigenvalues at zero.
  const double floor_width = kEps * kEps * std::max(op.norm(), std::numeric_limits<double>::min());
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= std::max(floor_width, 2.0 * kEps * std::max(std::abs(lo), std::abs(hi)))) break;
    if (mid <= lo || mid >= hi) break;
    if (op.count_below(mid) <= j) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<int> selected_indices(const SymmetricTridiagonal& op, const EigenSelection& sel) {
  std::vector<int> idx;
  if (sel.kind == EigenSelection::Kind::Index) {
    if (sel.first < 0 || sel.count < 0 || sel.first + sel.count > op.size())
      throw DomainError("tridiag_eigen: index selection out of range");
    for (int j = sel.first; j < sel.first + sel.count; ++j) idx.push_back(j);
  } else {
    if (!(sel.hi >= sel.lo)) throw DomainError("tridiag_eigen: empty window");
    const int a = op.count_below(sel.lo);
    const int b = op.count_below(sel.hi);
    for (int j = a; j < b; ++j) idx.push_back(j);
  }
  return idx;
}

// Twisted factorization eigenvector of the standard form T for eigenvalue λ,
// returned as (ln|v|, sign) with Σ v² = 1.
void twisted_vector(const SymmetricTridiagonal& op, double lambda, std::vector<double>& logv,
                    std::vector<std::int8_t>& sign) {
  const auto& a = op.standard_diagonal();
  const auto& b = op.standard_offdiagonal();
  const int n = op.size();
  const double tiny = kEps * std::max(op.norm(), std::numeric_limits<double>::min());
  auto guard = [tiny](double x) { return x == 0.0 ? tiny : x; };
  std::vector<double> dp(n), dm(n);
  dp[0] = guard(a[0] - lambda);
  for (int i = 1; i < n; ++i) dp[i] = guard(a[i] - lambda - b[i - 1] * b[i - 1] / dp[i - 1]);
  dm[n - 1] = guard(a[n - 1] - lambda);
  for (int i = n - 2; i >= 0; --i) dm[i] = guard(a[i] - lambda - b[i] * b[i] / dm[i + 1]);
  int r = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double gamma = std::abs(dp[i] + dm[i] - (a[i] - lambda));
    if (gamma < best) {
      best = gamma;
      r = i;
    }
  }
  logv.assign(n, kNegInf);
  sign.assign(n, 1);
  logv[r] = 0.0;
  for (int i = r - 1; i >= 0; --i) {
    if (logv[i + 1] == kNegInf || b[i] == 0.0) break;
    const double ratio = -b[i] / dp[i];
    logv[i] = logv[i + 1] + std::log(std::abs(ratio));
    sign[i] = static_cast<std::int8_t>(sign[i + 1] * (ratio < 0 ? -1 : 1));
  }
  for (int i = r + 1; i < n; ++i) {
    if (logv[i - 1] == kNegInf || b[i - 1] == 0.0) break;
    const double ratio = -b[i - 1] / dm[i];
    logv[i] = logv[i - 1] + std::log(std::abs(ratio));
    sign[i] = static_cast<std::int8_t>(sign[i - 1] * (ratio < 0 ? -1 : 1));
  }
  double mx = kNegInf;
  for (double l : logv) mx = std::max(mx, l);
  double s = 0.0;
  for (double l : logv)
    if (l != kNegInf) s += std::exp(2.0 * (l - mx));
  const double shift = mx + 0.5 * std::log(s);
  for (double& l : logv)
    if (l != kNegInf) l -= shift;
}

}  // namespace

double tridiag_eigenvalue(const SymmetricTridiagonal& op, int j) {
  if (j < 0 || j >= op.size()) throw DomainError("tridiag_eigenvalue: index out of range");
  const double pad = 2.0 * kEps * op.norm() + std::numeric_limits<double>::min();
  return bisect(op, j, op.lower_bound() - pad, op.upper_bound() + pad);
}

std::vector<double> tridiag_eigenvalues(const SymmetricTridiagonal& op, const EigenSelection& sel) {
  const auto idx = selected_indices(op, sel);
  std::vector<double> values;
  values.reserve(idx.size());
  const double pad = 2.0 * kEps * op.norm() + std::numeric_limits<double>::min();
  double lo = op.lower_bound() - pad;
  const double hi = op.upper_bound() + pad;
  for (int j : idx) {
    const double v = bisect(op, j, lo, hi);
    values.push_back(v);
    // The next eigenvalue is not below this one; tighten the bracket while
    // keeping count_below(lo) <= j+1.
    lo = std::max(lo, v - pad - 4.0 * kEps * std::abs(v));
    if (op.count_below(lo) > j + 1) lo = op.lower_bound() - pad;
  }
  return values;
}

TridiagEigen tridiag_eigen(const SymmetricTridiagonal& op, const EigenSelection& sel, bool want_vectors) {
  TridiagEigen out;
  out.indices = selected_indices(op, sel);
  out.values = tridiag_eigenvalues(op, sel.kind == EigenSelection::Kind::Index
                                             ? sel
                                             : EigenSelection::indices(out.indices.empty() ? 0 : out.indices.front(),
                                                                       static_cast<int>(out.indices.size())));
  if (!want_vectors) return out;
  const int n = op.size();
  const std::size_t m = out.values.size();
  out.log_abs.resize(m);
  out.signs.resize(m);
  std::vector<std::vector<double>> linear(m);
  for (std::size_t j = 0; j < m; ++j) {
    twisted_vector(op, out.values[j], out.log_abs[j], out.signs[j]);
    linear[j].resize(n);
    for (int i = 0; i < n; ++i)
      linear[j][i] = out.log_abs[j][i] == kNegInf ? 0.0 : out.signs[j][i] * std::exp(out.log_abs[j][i]);
  }
  // Gram-Schmidt inside clusters of nearly equal eigenvalues.
  const double cluster = 1e-9 * std::max(op.norm(), 1e-300);
  for (std::size_t j = 1; j < m; ++j) {
    bool touched = false;
    for (std::size_t p = j; p-- > 0;) {
      if (out.values[j] - out.values[p] > cluster) break;
      double dot = 0.0;
      for (int i = 0; i < n; ++i) dot += linear[j][i] * linear[p][i];
      for (int i = 0; i < n; ++i) linear[j][i] -= dot * linear[p][i];
      touched = true;
    }
    if (!touched) continue;
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) norm2 += linear[j][i] * linear[j][i];
    const double inv = 1.0 / std::sqrt(norm2);
    for (int i = 0; i < n; ++i) {
      linear[j][i] *= inv;
      out.log_abs[j][i] = linear[j][i] == 0.0 ? kNegInf : std::log(std::abs(linear[j][i]));
      out.signs[j][i] = linear[j][i] < 0.0 ? -1 : 1;
    }
  }
  // Map from the standard form back to W-normalized operator eigenvectors.
  const auto& w = op.weight();
  out.vectors.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    out.vectors[j].resize(n);
    for (int i = 0; i < n; ++i) {
      const double half_log_w = 0.5 * std::log(w[i]);
      if (out.log_abs[j][i] != kNegInf) out.log_abs[j][i] -= half_log_w;
      out.vectors[j][i] = out.log_abs[j][i] == kNegInf ? 0.0 : out.signs[j][i] * std::exp(out.log_abs[j][i]);
    }
  }
  return out;
}

}  // namespace semipos
