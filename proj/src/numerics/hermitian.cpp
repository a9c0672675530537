#include "semipos/numerics/hermitian.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>

#include "semipos/errors.hpp"

namespace semipos {

namespace {

template <class Matrix>
std::vector<double> solve(const Matrix& a) {
  if (a.rows() != a.cols()) throw ContractError("hermitian_eigen: matrix must be square");
  if (a.rows() == 0) return {};
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double asym = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) throw ContractError("hermitian_eigen: matrix is not Hermitian");
  const Matrix sym = 0.5 * (a + Matrix(a.adjoint()));
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ConvergenceError("hermitian_eigen: solver failed", 0.0, 0.0);
  std::vector<double> values(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(values.begin(), values.end());
  return values;
}

}  // namespace

std::vector<double> hermitian_eigen(const Eigen::MatrixXcd& matrix) { return solve(matrix); }
std::vector<double> hermitian_eigen(const Eigen::MatrixXd& matrix) { return solve(matrix); }

}  // namespace semipos
