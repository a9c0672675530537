#pragma once

#include <Eigen/Dense>
#include <vector>

namespace semipos {

/// Eigenvalues of a dense Hermitian matrix, ascending.
/// Throws ContractError when ‖A − A*‖ exceeds 1e-12·max(1, ‖A‖).
std::vector<double> hermitian_eigen(const Eigen::MatrixXcd& matrix);

/// Real symmetric overload.
std::vector<double> hermitian_eigen(const Eigen::MatrixXd& matrix);

}  // namespace semipos
