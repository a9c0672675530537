#include "semipos/toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/SVD>

#include "semipos/errors.hpp"
#include "semipos/numerics/hermitian.hpp"
#include "semipos/numerics/quadrature.hpp"
#include "semipos/numerics/special.hpp"
#include "semipos/numerics/stats.hpp"
#include "semipos/parallel.hpp"

namespace semipos {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kMaxLibraryBand = 4;

double softplus(double y) { return y > 0.0 ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y)); }
double logistic(double y) { return y > 0.0 ? 1.0 / (1.0 + std::exp(-y)) : std::exp(y) / (1.0 + std::exp(y)); }

std::vector<double> split(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw DomainError("symbol: cannot parse number '" + item + "'");
    }
    if (used != item.size()) throw DomainError("symbol: cannot parse number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

RadialProfile parse_profile(const std::string& text) {
  const auto eq = text.find('=');
  const std::string name = text.substr(0, eq);
  const std::vector<double> params = eq == std::string::npos ? std::vector<double>{} : split(text.substr(eq + 1), ',');
  RadialProfile p;
  auto need = [&](std::size_t n) {
    if (params.size() != n) throw DomainError("symbol: '" + name + "' takes " + std::to_string(n) + " parameters");
  };
  if (name == "one") {
    need(0);
    p.kind = RadialProfile::Kind::one;
  } else if (name == "fs_height") {
    need(0);
    p.kind = RadialProfile::Kind::fs_height;
  } else if (name == "bump" || name == "step_smooth") {
    need(2);
    p.kind = name == "bump" ? RadialProfile::Kind::bump : RadialProfile::Kind::step_smooth;
    p.p1 = params[0];
    p.p2 = params[1];
    if (!(p.p2 > 0.0)) throw DomainError("symbol: width must be positive");
  } else {
    throw DomainError("symbol: unknown profile '" + name + "'");
  }
  return p;
}

// Supremum of a smooth function of x on a log grid, refined around the best node.
double sup_on_line(const std::function<double(double)>& g, double lo, double hi, int n) {
  double best = kNegInf, arg = lo;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * i / n;
    const double v = g(x);
    if (v > best) {
      best = v;
      arg = x;
    }
  }
  const double step = (hi - lo) / n;
  double fmin = 0.0;
  golden_section_minimize([&](double x) { return -g(x); }, std::max(lo, arg - step), std::min(hi, arg + step), 1e-13,
                          &fmin);
  return std::max(best, -fmin);
}

// ln of the measure density against (1/π)dxdy at t = e^x.
double log_density(MeasureTag measure, int r, double x) {
  if (measure == MeasureTag::omega_r) return std::log(0.25 * r * r) + (r - 2.0) * x - 2.0 * softplus(r * x);
  return -2.0 * softplus(2.0 * x);
}

// ln ∫ radial(t) t^{2p} (1+t^r)^{−k} ρ(t) 2t dt, with 2p = α + β.
double log_radial_moment(const Symbol& f, MeasureTag measure, int r, int k, int two_p) {
  auto weight_slope = [&](double x) {
    if (measure == MeasureTag::omega_r) return two_p + 2.0 + (r - 2.0) - (k + 2.0) * r * logistic(r * x);
    return two_p + 2.0 - k * r * logistic(r * x) - 4.0 * logistic(2.0 * x);
  };
  double lo = -1.0, hi = 1.0;
  while (weight_slope(lo) < 0.0) lo *= 2.0;
  while (weight_slope(hi) > 0.0) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    (weight_slope(mid) > 0.0 ? lo : hi) = mid;
  }
  const double x0 = 0.5 * (lo + hi);
  double curvature;
  if (measure == MeasureTag::omega_r) {
    const double s = logistic(r * x0);
    curvature = (k + 2.0) * r * r * s * (1.0 - s);
  } else {
    const double s1 = logistic(r * x0), s2 = logistic(2.0 * x0);
    curvature = k * r * r * s1 * (1.0 - s1) + 8.0 * s2 * (1.0 - s2);
  }
  QuadratureSpec spec;
  // Same cap as the round norms: the log integrand is O(k) in size.
  spec.relative_tolerance = 1e-11;
  auto log_f = [&](double x) {
    const double t = std::exp(x);
    return std::log(2.0) + (two_p + 2.0) * x - k * softplus(r * x) + log_density(measure, r, x) + f.log_radial(t);
  };
  return integrate_log_peaked(log_f, x0, 1.0 / std::sqrt(curvature), spec);
}

void require_cp1(const SurfaceModel& model, int k) {
  if (model.kind() != SurfaceKind::cp1_semipositive) throw DomainError("toeplitz: requires the cp1 model");
  if (k <= 0) throw DomainError("toeplitz: k must be positive");
}

void require_radial(const Symbol& f, const char* what) {
  if (!f.is_radial()) throw UnsupportedError(std::string(what) + ": radial symbols only");
}

struct Assembled {
  ToeplitzMatrix t;
  std::vector<double> log_norms;
};

Assembled assemble(const SurfaceModel& model, int k, const Symbol& f, MeasureTag measure) {
  require_cp1(model, k);
  const int r = model.r();
  const int D = r * k / 2;
  const int band = f.bandwidth();
  const Symbol one = Symbol::radial({});
  Assembled out;
  out.log_norms.resize(D + 1);
  parallel_for(D + 1, [&](std::size_t a) {
    out.log_norms[a] = log_radial_moment(one, measure, r, k, 2 * static_cast<int>(a));
  });
  out.t.k = k;
  out.t.measure = measure;
  out.t.bandwidth = band;
  out.t.matrix = Eigen::MatrixXcd::Zero(D + 1, D + 1);
  // Column a holds rows b = a..a+band; the rest follows by Hermitian symmetry.
  std::vector<std::vector<std::complex<double>>> columns(D + 1);
  parallel_for(D + 1, [&](std::size_t ai) {
    const int a = static_cast<int>(ai);
    for (int b = a; b <= std::min(D, a + band); ++b) {
      const std::complex<double> c = f.fourier(b - a);
      if (c == 0.0) {
        columns[a].push_back(0.0);
        continue;
      }
      const double li = log_radial_moment(f, measure, r, k, a + b);
      columns[a].push_back(c * std::exp(li - 0.5 * (out.log_norms[a] + out.log_norms[b])));
    }
  });
  for (int a = 0; a <= D; ++a) {
    for (std::size_t j = 0; j < columns[a].size(); ++j) {
      const int b = a + static_cast<int>(j);
      out.t.matrix(b, a) = columns[a][j];
      out.t.matrix(a, b) = std::conj(columns[a][j]);
    }
    out.t.matrix(a, a) = out.t.matrix(a, a).real();
  }
  return out;
}

}  // namespace

double RadialProfile::log_value(double t) const {
  switch (kind) {
    case Kind::one:
      return 0.0;
    case Kind::fs_height:
      if (t == 0.0) return kNegInf;
      return -std::log1p(1.0 / (t * t));
    case Kind::bump: {
      const double d = (t - p1) / p2;
      return -d * d;
    }
    case Kind::step_smooth:
      if (std::isinf(t)) return 0.0;
      // (1 + tanh y)/2 = σ(2y).
      return -softplus(-2.0 * (t - p1) / p2);
  }
  return 0.0;
}

std::string RadialProfile::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::one:
      return "one";
    case Kind::fs_height:
      return "fs_height";
    case Kind::bump:
      os << "bump=" << p1 << "," << p2;
      return os.str();
    case Kind::step_smooth:
      os << "step_smooth=" << p1 << "," << p2;
      return os.str();
  }
  return "";
}

Symbol Symbol::radial(RadialProfile profile) {
  Symbol s;
  if (profile.kind != RadialProfile::Kind::one) s.factors_.push_back(profile);
  return s;
}

Symbol Symbol::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) parts.push_back(item);
  if (parts.empty() || parts[0].empty()) throw DomainError("symbol: empty description");
  Symbol s = Symbol::radial(parse_profile(parts[0]));
  if (parts.size() > 1) s.coefficients_.clear();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto v = split(parts[i], ':');
    if (v.size() < 2 || v.size() > 3 || v[0] != std::round(v[0]))
      throw DomainError("symbol: Fourier entries are n:re[:im]");
    const int n = static_cast<int>(v[0]);
    if (n < 0) throw DomainError("symbol: list only n ≥ 0; the conjugate at −n is implied");
    s.with_fourier(n, {v[1], v.size() == 3 ? v[2] : 0.0});
  }
  if (s.bandwidth() > kMaxLibraryBand) throw DomainError("symbol: Fourier content limited to |n| ≤ 4");
  return s;
}

Symbol& Symbol::with_fourier(int n, std::complex<double> c) {
  if (n == 0) {
    if (c.imag() != 0.0) throw DomainError("symbol: c_0 must be real");
    coefficients_[0] = c;
    return *this;
  }
  coefficients_[n] = c;
  coefficients_[-n] = std::conj(c);
  return *this;
}

double Symbol::log_radial(double t) const {
  double acc = 0.0;
  for (const auto& p : factors_) acc += p.log_value(t);
  return acc;
}

double Symbol::radial_value(double t) const { return std::exp(log_radial(t)); }

std::complex<double> Symbol::fourier(int n) const {
  const auto it = coefficients_.find(n);
  return it == coefficients_.end() ? std::complex<double>(0.0) : it->second;
}

int Symbol::bandwidth() const {
  int band = 0;
  for (const auto& [n, c] : coefficients_)
    if (c != 0.0) band = std::max(band, std::abs(n));
  return band;
}

double Symbol::sup_norm() const {
  // Radial factors are non-negative, so sup |f| = sup radial · sup |trig part|.
  const double radial_log_sup = std::max(
      {sup_on_line([&](double x) { return log_radial(std::exp(x)); }, -300.0, 300.0, 60000), log_radial(0.0),
       log_radial(std::numeric_limits<double>::infinity())});
  auto trig = [&](double th) {
    std::complex<double> acc = 0.0;
    for (const auto& [n, c] : coefficients_) acc += c * std::polar(1.0, n * th);
    return std::abs(acc);
  };
  const double trig_sup = bandwidth() == 0 ? std::abs(fourier(0)) : sup_on_line(trig, 0.0, 2.0 * kPi, 8192);
  return std::exp(radial_log_sup) * trig_sup;
}

std::string Symbol::describe() const {
  std::ostringstream os;
  if (factors_.empty()) os << "one";
  for (std::size_t i = 0; i < factors_.size(); ++i) os << (i ? "*" : "") << factors_[i].describe();
  if (!(coefficients_.size() == 1 && fourier(0) == 1.0)) {
    for (const auto& [n, c] : coefficients_) {
      if (n < 0 || c == 0.0) continue;
      os << ";" << n << ":" << c.real();
      if (c.imag() != 0.0) os << ":" << c.imag();
    }
  }
  return os.str();
}

Symbol Symbol::operator*(const Symbol& other) const {
  Symbol s;
  s.factors_ = factors_;
  s.factors_.insert(s.factors_.end(), other.factors_.begin(), other.factors_.end());
  s.coefficients_.clear();
  for (const auto& [n, c] : coefficients_)
    for (const auto& [m, d] : other.coefficients_) s.coefficients_[n + m] += c * d;
  return s;
}

ToeplitzMatrix assemble_toeplitz(const SurfaceModel& model, int k, const Symbol& f, MeasureTag measure) {
  return assemble(model, k, f, measure).t;
}

std::vector<double> toeplitz_eigenvalues(const ToeplitzMatrix& t) {
  if (t.bandwidth == 0) {
    std::vector<double> d(t.matrix.rows());
    for (int i = 0; i < t.matrix.rows(); ++i) d[i] = t.matrix(i, i).real();
    std::sort(d.begin(), d.end());
    return d;
  }
  return hermitian_eigen(t.matrix);
}

double toeplitz_norm(const SurfaceModel& model, int k, const Symbol& f, MeasureTag measure) {
  const auto ev = toeplitz_eigenvalues(assemble_toeplitz(model, k, f, measure));
  return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

double composition_defect(const SurfaceModel& model, int k, const Symbol& f, const Symbol& g, MeasureTag measure) {
  const auto tf = assemble_toeplitz(model, k, f, measure);
  const auto tg = assemble_toeplitz(model, k, g, measure);
  const auto tfg = assemble_toeplitz(model, k, f * g, measure);
  if (tf.bandwidth == 0 && tg.bandwidth == 0) {
    double worst = 0.0;
    for (int i = 0; i < tf.matrix.rows(); ++i)
      worst = std::max(worst, std::abs(tf.matrix(i, i) * tg.matrix(i, i) - tfg.matrix(i, i)));
    return worst;
  }
  const Eigen::MatrixXcd defect = tf.matrix * tg.matrix - tfg.matrix;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(defect);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

double pushforward_cdf(const SurfaceModel& model, const Symbol& f, double y, bool left) {
  require_radial(f, "pushforward_cdf");
  if (model.kind() != SurfaceKind::cp1_semipositive) throw DomainError("pushforward_cdf: requires the cp1 model");
  const int r = model.r();
  const double c0 = f.fourier(0).real();
  // Under ω_r/(r/2) the mass of {t ≤ s} is u = s^r/(1+s^r); integrate the indicator in u.
  auto value_at = [&](double u) {
    if (u <= 0.0) return c0 * f.radial_value(0.0);
    if (u >= 1.0) return c0 * f.radial_value(std::numeric_limits<double>::infinity());
    return c0 * f.radial_value(std::pow(u / (1.0 - u), 1.0 / r));
  };
  auto inside = [&](double u) {
    const double v = value_at(u);
    return left ? v < y : v <= y;
  };
  const int n = 4096;
  double mass = 0.0;
  double u0 = 0.0;
  bool in0 = inside(u0);
  for (int i = 1; i <= n; ++i) {
    const double u1 = static_cast<double>(i) / n;
    const bool in1 = inside(u1);
    if (in0 == in1) {
      if (in0) mass += u1 - u0;
    } else {
      double lo = u0, hi = u1;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (inside(mid) == in0 ? lo : hi) = mid;
      }
      mass += in0 ? lo - u0 : u1 - hi;
    }
    u0 = u1;
    in0 = in1;
  }
  return std::clamp(mass, 0.0, 1.0);
}

SzegoComparison szego_measure(const SurfaceModel& model, int k, const Symbol& f, MeasureTag measure) {
  require_radial(f, "szego_measure");
  SzegoComparison out;
  out.eigenvalues = toeplitz_eigenvalues(assemble_toeplitz(model, k, f, measure));
  out.ks = ks_distance(
      out.eigenvalues, [&](double y) { return pushforward_cdf(model, f, y); },
      [&](double y) { return pushforward_cdf(model, f, y, true); });
  return out;
}

double toeplitz_diag_ratio(const SurfaceModel& model, int k, const Symbol& f, double t, MeasureTag measure) {
  require_radial(f, "toeplitz_diag_ratio");
  if (!(t >= 0.0)) throw DomainError("toeplitz_diag_ratio: t must be non-negative");
  const Assembled a = assemble(model, k, f, measure);
  const int D = static_cast<int>(a.log_norms.size()) - 1;
  if (t == 0.0) return a.t.matrix(0, 0).real();
  if (std::isinf(t)) return a.t.matrix(D, D).real();
  const int r = model.r();
  const double y = std::log(t);
  // Weights |z^α|²h/‖z^α‖², shifted by their maximum.
  std::vector<double> lw(D + 1);
  for (int al = 0; al <= D; ++al) lw[al] = 2.0 * al * y - k * softplus(r * y) - a.log_norms[al];
  const double top = *std::max_element(lw.begin(), lw.end());
  double num = 0.0, den = 0.0;
  for (int al = 0; al <= D; ++al) {
    const double w = std::exp(lw[al] - top);
    num += w * a.t.matrix(al, al).real();
    den += w;
  }
  return num / den;
}

double curvature_integral(const SurfaceModel& model, const Symbol& f) {
  require_radial(f, "curvature_integral");
  if (model.kind() != SurfaceKind::cp1_semipositive) throw DomainError("curvature_integral: requires the cp1 model");
  QuadratureSpec spec;
  spec.substitution_exponent = model.r();
  spec.relative_tolerance = 1e-12;
  // ∫ f b (1/π)dxdy = ∫₀^∞ f(t) b(t) 2t dt.
  return f.fourier(0).real() *
         integrate_radial([&](double t) { return 2.0 * t * model.b(t) * f.radial_value(t); }, spec);
}

}  // namespace semipos
