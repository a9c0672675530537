#pragma once

#include <functional>
#include <vector>

#include "semipos/numerics/tridiag.hpp"

namespace semipos {

/// Cell-centred finite differences for −(P u′)′ + Q u = λ W u on a uniform
/// grid of n cells with spacing h in the independent variable.
///
/// p_faces has n+1 entries (P at cell faces); q and w hold Q, W at centres.
/// A zero face value gives the natural (regular singular) condition; a
/// nonzero last face value imposes u = 0 one half-cell past the last face.
SymmetricTridiagonal assemble_sturm_liouville(const std::vector<double>& p_faces, const std::vector<double>& q,
                                              const std::vector<double>& w, double h);

/// Value at the left face of a cell-centred grid function, by quadratic
/// extrapolation from the first three centres.
double extrapolate_left(double u0, double u1, double u2);

/// Richardson extrapolation for O(h²) schemes: (4·fine − coarse)/3.
double richardson(double coarse, double fine);

struct ExtrapolatedValues {
  std::vector<double> values;
  std::vector<double> errors;
  int nodes = 0;
};

/// Runs solve(n) for n = n0, 2n0, … and Richardson-extrapolates each pair of
/// levels once. The error of an entry is the change of its extrapolated
/// value between the last two levels; refinement stops from the second
/// extrapolation on once every error is below tolerance·max(|value|, floor).
/// Deeper Romberg columns are not used: a centrifugal endpoint spoils the
/// pure h^{2j} expansion past the first term. solve must return vectors of
/// one fixed length. Throws ConvergenceError after max_refinements doublings.
ExtrapolatedValues extrapolate_refinement(const std::function<std::vector<double>(int)>& solve, int n0,
                                          double tolerance, int max_refinements, double floor = 0.0);

}  // namespace semipos
