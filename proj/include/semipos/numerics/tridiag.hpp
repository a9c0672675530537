#pragma once

#include <cstdint>
#include <vector>

namespace semipos {

/// Generalized symmetric tridiagonal pencil S u = λ W u.
///
/// S has `diagonal` and `offdiagonal`; W = diag(weight) > 0. The represented
/// operator W⁻¹S is self-adjoint for ⟨u,v⟩ = Σ wᵢ uᵢ vᵢ. Internally the
/// standard form T = W^{-1/2} S W^{-1/2} is kept.
class SymmetricTridiagonal {
 public:
  /// Empty placeholder; only assignment is meaningful.
  SymmetricTridiagonal() = default;
  SymmetricTridiagonal(std::vector<double> diagonal, std::vector<double> offdiagonal, std::vector<double> weight);
  SymmetricTridiagonal(std::vector<double> diagonal, std::vector<double> offdiagonal);

  /// Build from an operator matrix with explicit sub/super diagonals.
  /// Throws ContractError unless wᵢ·superᵢ = wᵢ₊₁·subᵢ to 1e-14 relative.
  static SymmetricTridiagonal from_operator(const std::vector<double>& sub, const std::vector<double>& diagonal,
                                            const std::vector<double>& super, const std::vector<double>& weight);

  int size() const { return static_cast<int>(diagonal_.size()); }
  const std::vector<double>& diagonal() const { return diagonal_; }
  const std::vector<double>& offdiagonal() const { return offdiagonal_; }
  const std::vector<double>& weight() const { return weight_; }

  /// Standard form entries.
  const std::vector<double>& standard_diagonal() const { return t_diag_; }
  const std::vector<double>& standard_offdiagonal() const { return t_off_; }

  /// Number of eigenvalues strictly below x (Sturm sequence sign count).
  int count_below(double x) const;

  /// Gershgorin enclosure of the spectrum.
  double lower_bound() const { return gersh_lo_; }
  double upper_bound() const { return gersh_hi_; }
  /// Max-row-sum norm of T.
  double norm() const { return std::max(std::abs(gersh_lo_), std::abs(gersh_hi_)); }

  /// Apply the operator W⁻¹S to u.
  std::vector<double> apply(const std::vector<double>& u) const;

 private:
  void finish();

  std::vector<double> diagonal_, offdiagonal_, weight_;
  std::vector<double> t_diag_, t_off_, t_off_sq_;
  double gersh_lo_ = 0.0, gersh_hi_ = 0.0;
};

/// Which eigenvalues to return: the `count` smallest starting at index
/// `first`, or all of them in the half-open window [lo, hi).
struct EigenSelection {
  enum class Kind { Index, Window } kind = Kind::Index;
  int first = 0;
  int count = 1;
  double lo = 0.0, hi = 0.0;

  static EigenSelection lowest(int n) { return {Kind::Index, 0, n, 0.0, 0.0}; }
  static EigenSelection indices(int first, int n) { return {Kind::Index, first, n, 0.0, 0.0}; }
  static EigenSelection window(double lo, double hi) { return {Kind::Window, 0, 0, lo, hi}; }
};

/// Eigenpairs of a SymmetricTridiagonal.
///
/// vectors[j] is W-normalized (Σ wᵢ uᵢ² = 1). Components far from the
/// support underflow in `vectors` but stay finite in log_abs, which holds
/// ln|uᵢ| (−inf for exact zeros) with signs in `signs`.
struct TridiagEigen {
  std::vector<double> values;
  std::vector<int> indices;
  std::vector<std::vector<double>> vectors;
  std::vector<std::vector<double>> log_abs;
  std::vector<std::vector<std::int8_t>> signs;
};

/// Eigenvalues by Sturm bisection, ascending.
std::vector<double> tridiag_eigenvalues(const SymmetricTridiagonal& op, const EigenSelection& sel);

/// Eigenvalues plus eigenvectors (twisted factorization, log form).
TridiagEigen tridiag_eigen(const SymmetricTridiagonal& op, const EigenSelection& sel, bool want_vectors = true);

/// Single eigenvalue with index j (0-based, ascending).
double tridiag_eigenvalue(const SymmetricTridiagonal& op, int j);

}  // namespace semipos
