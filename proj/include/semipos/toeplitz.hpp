#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "semipos/bergman.hpp"
#include "semipos/surface.hpp"

namespace semipos {

/// One factor of the radial part of a symbol, as a function of t = |z|.
///  - one: 1
///  - fs_height: t²/(1+t²)
///  - bump(c, w): exp(−((t−c)/w)²)
///  - step_smooth(s, w): (1 + tanh((t−s)/w))/2
struct RadialProfile {
  enum class Kind { one, fs_height, bump, step_smooth };
  Kind kind = Kind::one;
  double p1 = 0.0;
  double p2 = 1.0;
  double log_value(double t) const;
  std::string describe() const;
};

/// f(t, θ) = Π radial factors(t) · Σ_n c_n e^{inθ}. The coefficients satisfy
/// c_{−n} = conj(c_n), so f is real.
class Symbol {
 public:
  Symbol() = default;
  static Symbol radial(RadialProfile profile);
  /// "fs_height", "bump=c,w", "step_smooth=s,w", "one", optionally followed by
  /// Fourier content "n:re[:im]" entries separated by ';', e.g.
  /// "bump=1,0.3;1:0.5". Listed n > 0 get their conjugate at −n; an unlisted
  /// n = 0 coefficient defaults to 1 only when no Fourier content is given.
  static Symbol parse(const std::string& text);

  /// Sets c_n and c_{−n} = conj(c_n). |n| ≤ 4 for library symbols.
  Symbol& with_fourier(int n, std::complex<double> c);

  double log_radial(double t) const;
  double radial_value(double t) const;
  std::complex<double> fourier(int n) const;
  int bandwidth() const;
  bool is_radial() const { return bandwidth() == 0; }
  /// sup |f|, from the radial supremum times the supremum of the trigonometric part.
  double sup_norm() const;
  std::string describe() const;

  /// Pointwise product; radial factors concatenate and Fourier content convolves.
  Symbol operator*(const Symbol& other) const;

 private:
  std::vector<RadialProfile> factors_;
  std::map<int, std::complex<double>> coefficients_{{0, 1.0}};
};

/// T_{f,k} = Π_k f Π_k in the orthonormalized monomial basis.
struct ToeplitzMatrix {
  int k = 0;
  MeasureTag measure = MeasureTag::omega_r;
  int bandwidth = 0;
  Eigen::MatrixXcd matrix;
};

/// Entries ⟨f s_α, s_β⟩/(‖s_α‖‖s_β‖) by 1-D quadrature per Fourier mode.
/// Norms in the denominator use the same quadrature, so f ≡ 1 gives the identity.
ToeplitzMatrix assemble_toeplitz(const SurfaceModel& model, int k, const Symbol& f,
                                 MeasureTag measure = MeasureTag::omega_r);

/// Eigenvalues of T, ascending.
std::vector<double> toeplitz_eigenvalues(const ToeplitzMatrix& t);

/// Largest-magnitude eigenvalue.
double toeplitz_norm(const SurfaceModel& model, int k, const Symbol& f, MeasureTag measure = MeasureTag::omega_r);

/// Spectral norm of T_f T_g − T_{fg}.
double composition_defect(const SurfaceModel& model, int k, const Symbol& f, const Symbol& g,
                          MeasureTag measure = MeasureTag::omega_r);

/// Eigenvalue distribution of T_{f,k} against the pushforward of the
/// normalized curvature measure ω_r/(r/2) under f. Radial f only.
struct SzegoComparison {
  std::vector<double> eigenvalues;
  double ks = 0.0;
};
SzegoComparison szego_measure(const SurfaceModel& model, int k, const Symbol& f,
                              MeasureTag measure = MeasureTag::omega_r);

/// CDF of f under ω_r/(r/2). `left` gives the limit from below.
double pushforward_cdf(const SurfaceModel& model, const Symbol& f, double y, bool left = false);

/// T_{f,k}(y,y)/Π_k(y,y) at |z| = t (t may be +∞). Radial f only.
double toeplitz_diag_ratio(const SurfaceModel& model, int k, const Symbol& f, double t,
                           MeasureTag measure = MeasureTag::omega_r);

/// ∫ f ω_r, the limit of tr T_{f,k}/k.
double curvature_integral(const SurfaceModel& model, const Symbol& f);

}  // namespace semipos
