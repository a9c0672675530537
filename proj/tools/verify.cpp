#include "verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>

#include "semipos/asymptotics.hpp"
#include "semipos/bergman.hpp"
#include "semipos/errors.hpp"
#include "semipos/model_ops.hpp"
#include "semipos/numerics/special.hpp"
#include "semipos/numerics/stats.hpp"
#include "semipos/parallel.hpp"
#include "semipos/random_sections.hpp"
#include "semipos/spectral.hpp"
#include "semipos/surface.hpp"
#include "semipos/toeplitz.hpp"

namespace semipos::verify {

namespace {

using json = nlohmann::ordered_json;
constexpr double kPi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

std::vector<double> powers_of_two(int lo, int hi) {
  std::vector<double> ks;
  for (int e = lo; e <= hi; ++e) ks.push_back(std::ldexp(1.0, e));
  return ks;
}

// Collects sub-verdicts of one check; the check passes iff all of them do.
class Verdict {
 public:
  explicit Verdict(CheckResult& out) : out_(out) {}
  void require(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
    notes_.push_back((ok ? "" : "FAILED ") + what);
  }
  void finish() {
    out_.passed = failures_.empty();
    std::string d;
    for (const auto& n : notes_) d += (d.empty() ? "" : "; ") + n;
    out_.detail = d;
  }

 private:
  CheckResult& out_;
  std::vector<std::string> notes_, failures_;
};

struct Context {
  const SuiteOptions& options;
  std::map<std::string, double> tol;
  double operator()(const std::string& name) const { return tol.at(name); }
};

// --- shared pieces -------------------------------------------------------

void norm_identity(const Context& tol, CheckResult& out, Verdict& v, const std::vector<int>& rs, const std::string& prefix) {
  double worst_quad = 0.0, worst_exact = 0.0;
  for (int r : rs) {
    for (int k : {8, 32, 128}) {
      const auto basis = section_norms(SurfaceModel::cp1(r), k, MeasureTag::omega_r);
      for (int a = 0; a <= basis.D; ++a) {
        worst_quad = std::max(worst_quad, rel(basis.norm(a), omega_norm_by_quadrature(r, k, a)));
        if (r == 2) worst_exact = std::max(worst_exact, rel(basis.norm(a), std::exp(-std::log(k + 1.0) - log_binomial(k, a))));
      }
    }
  }
  out.numbers["max_rel_quadrature"] = worst_quad;
  out.numbers["max_rel_closed_form_r2"] = worst_exact;
  v.require(worst_quad < tol(prefix + ".norm_rel"), "quadrature rel " + fmt(worst_quad) + " < " + fmt(tol(prefix + ".norm_rel")));
  v.require(worst_exact < tol(prefix + ".exact_rel"), "r=2 closed form rel " + fmt(worst_exact) + " < " + fmt(tol(prefix + ".exact_rel")));
}

void su2_constancy(const Context& tol, CheckResult& out, Verdict& v, const std::string& name) {
  double worst = 0.0;
  for (int k : {1, 16, 256, 1024}) {
    const auto basis = section_norms(SurfaceModel::cp1(2), k, MeasureTag::omega_r);
    for (int i = 0; i < 50; ++i) {
      const double t = t_of_theta(kPi * (i + 0.5) / 50.0);
      worst = std::max(worst, rel(bergman_diag(basis, t), k + 1.0));
    }
  }
  out.numbers["max_rel"] = worst;
  v.require(worst < tol(name), "max rel |Π−(k+1)| " + fmt(worst) + " < " + fmt(tol(name)));
}

void r2_lambda0(const Context& tol, CheckResult& out, Verdict& v, const std::string& name, const std::vector<int>& ks) {
  double worst = 0.0;
  json values = json::array();
  for (int k : ks) {
    const double l = lambda0(SurfaceModel::cp1(2), k).value;
    values.push_back(l / k);
    worst = std::max(worst, rel(l / k, 2 * kPi));
  }
  out.numbers["r2_lambda0_over_k"] = values;
  v.require(worst < tol(name), "r=2 λ₀/k vs 2π rel " + fmt(worst));
}

void r2_tian(const Context& tol, CheckResult& out, Verdict& v, const std::string& name) {
  double worst = 0.0;
  const auto grid = hemisphere_grid(128);
  for (int k : {64, 512, 4096}) {
    const auto gap = tian_gap(section_norms(SurfaceModel::cp1(2), k, MeasureTag::omega_r), grid);
    worst = std::max(worst, rel(gap.potential, std::log(k + 1.0) / k));
  }
  out.numbers["r2_potential_rel"] = worst;
  v.require(worst < tol(name), "r=2 potential gap vs ln(k+1)/k rel " + fmt(worst));
}

double r2_toeplitz_eigen(int k) {
  const auto ev = toeplitz_eigenvalues(assemble_toeplitz(SurfaceModel::cp1(2), k, Symbol::parse("fs_height")));
  double worst = 0.0;
  for (int a = 0; a <= k; ++a) worst = std::max(worst, std::abs(ev[a] - (a + 1.0) / (k + 2.0)));
  return worst;
}

// --- smoke tier ----------------------------------------------------------

void s1(const Context& tol, CheckResult& out, Verdict& v) { norm_identity(tol, out, v, {2}, "s1"); }
void s2(const Context& tol, CheckResult& out, Verdict& v) { su2_constancy(tol, out, v, "s2.rel"); }
void s3(const Context& tol, CheckResult& out, Verdict& v) { r2_lambda0(tol, out, v, "s3.rel", {16, 64}); }

void s4(const Context& tol, CheckResult& out, Verdict& v) {
  double worst = 0.0;
  bool exact = true;
  for (int k : {16, 64}) {
    const auto s = kodaira_spectrum(SurfaceModel::cp1(2), k);
    exact = exact && s.zero_modes == k + 1;
    worst = std::max(worst, rel(s.first_positive, 4 * kPi * k + 8 * kPi));
    out.numbers["zero_modes_k" + std::to_string(k)] = s.zero_modes;
  }
  out.numbers["gap_rel"] = worst;
  v.require(exact, "zero modes = k+1");
  v.require(worst < tol("s4.gap_rel"), "gap vs 4πk+8π rel " + fmt(worst));
}

void s5(const Context& tol, CheckResult& out, Verdict& v) { r2_tian(tol, out, v, "s5.exact_rel"); }

void s6(const Context& tol, CheckResult& out, Verdict& v) {
  const double e = r2_toeplitz_eigen(256);
  const double ks = szego_measure(SurfaceModel::cp1(2), 256, Symbol::parse("fs_height")).ks;
  out.numbers["eig_abs"] = e;
  out.numbers["szego_ks"] = ks;
  v.require(e < tol("s6.eig_abs"), "eigenvalues vs (α+1)/(k+2) " + fmt(e));
  v.require(ks < tol("s6.szego_ks"), "Szegő KS " + fmt(ks));
}

void s7(const Context& tol, CheckResult& out, Verdict& v) {
  const auto p = torsion_coefficients(SurfaceModel::cp1(2));
  out.numbers["A"] = p.A;
  out.numbers["B"] = p.B;
  out.numbers["riemann_roch_k10"] = riemann_roch_dim(SurfaceModel::cp1(2), 10);
  v.require(std::abs(p.A - 0.25) < tol("s7.abs"), "A = 1/4");
  v.require(std::abs(p.B) < tol("s7.abs"), "B = 0");
  v.require(riemann_roch_dim(SurfaceModel::cp1(2), 10) == 11, "dim = 11 at k = 10");
}

// --- full tier -----------------------------------------------------------

void c1(const Context& tol, CheckResult& out, Verdict& v) { norm_identity(tol, out, v, {2, 4, 6}, "c1"); }
void c2(const Context& tol, CheckResult& out, Verdict& v) { su2_constancy(tol, out, v, "c2.rel"); }

void c3(const Context& tol, CheckResult& out, Verdict& v) {
  const auto ks = powers_of_two(5, 13);
  auto scan = [&](int r, double t) {
    std::vector<double> vals;
    for (double k : ks) vals.push_back(bergman_diag(section_norms(SurfaceModel::cp1(r), static_cast<int>(k), MeasureTag::round), t));
    return fit_scaling(ks, vals);
  };
  const double w = tol("c3.slope");
  const auto p4 = scan(4, 0.0), e4 = scan(4, 1.0), p6 = scan(6, 0.0);
  for (auto [name, f] : {std::pair{"r4_pole", &p4}, {"r4_equator", &e4}, {"r6_pole", &p6}}) {
    out.numbers[std::string(name) + "_ols_slope"] = f->slope;
    out.numbers[std::string(name) + "_expansion_exponent"] = f->expansion_exponent;
  }
  v.require(std::abs(p4.expansion_exponent - 0.5) <= w, "r=4 pole exponent " + fmt(p4.expansion_exponent) + " (OLS " + fmt(p4.slope) + ")");
  v.require(std::abs(e4.slope - 1.0) <= w && std::abs(e4.expansion_exponent - 1.0) <= w, "r=4 equator slope " + fmt(e4.slope));
  v.require(std::abs(p6.expansion_exponent - 1.0 / 3) <= w, "r=6 pole exponent " + fmt(p6.expansion_exponent) + " (OLS " + fmt(p6.slope) + ")");
}

void c4(const Context& tol, CheckResult& out, Verdict& v) {
  const auto model = SurfaceModel::cp1(4);
  const double value = bergman_diag(section_norms(model, 8192, MeasureTag::round), 0.0) / std::sqrt(8192.0);
  const double target = model_kernel_diag(4, jet_coefficient(model, Pole::north));
  out.numbers["scaled_pole_value"] = value;
  out.numbers["model_kernel_diag"] = target;
  v.require(rel(value, target) < tol("c4.rel"), "k^{-1/2}Π(0) / model = " + fmt(value / target));
}

void c5(const Context& tol, CheckResult& out, Verdict& v) {
  r2_lambda0(tol, out, v, "c5.r2_rel", {16, 64, 256});
  const auto m4 = SurfaceModel::cp1(4);
  const double C4 = lambda0_model_constant(m4);
  const double s4 = lambda0(m4, 8192).value / std::sqrt(8192.0);
  out.numbers["r4_scaled_lambda0_k8192"] = s4;
  out.numbers["r4_model_constant"] = C4;
  v.require(rel(s4, C4) < tol("c5.r4_rel"), "r=4 λ₀k^{-1/2}/C = " + fmt(s4 / C4));
  const auto circle = SurfaceModel::circle(3, 2 * kPi);
  const auto ks = powers_of_two(8, 13);
  std::vector<double> vals;
  for (double k : ks) vals.push_back(lambda0(circle, static_cast<int>(k)).value);
  const auto fit = fit_scaling(ks, vals);
  out.numbers["circle_ols_slope"] = fit.slope;
  out.numbers["circle_ratio_k8192"] = vals.back() * std::pow(ks.back(), -2.0 / 3) / lambda0_model_constant(circle);
  v.require(std::abs(fit.slope - 2.0 / 3) <= tol("c5.circle_slope"), "circle exponent " + fmt(fit.slope));
}

void c6(const Context& tol, CheckResult& out, Verdict& v) {
  const auto model = SurfaceModel::cp1(4);
  const double a = ground_state_concentration(model, 512, 0.5).log_mass;
  const double b = ground_state_concentration(model, 4096, 0.5).log_mass;
  out.numbers["log_mass_k512"] = a;
  out.numbers["log_mass_k4096"] = b;
  v.require(a - b >= std::log(tol("c6.factor")), "mass drop factor e^" + fmt(a - b));
}

void c7(const Context& tol, CheckResult& out, Verdict& v) {
  const auto model = SurfaceModel::cp1(4);
  for (auto [c1v, c2v] : {std::pair{8.0, 16.0}, {8.0, 23.0}}) {
    const auto expected = std::lround(weyl_prediction(model, c1v, c2v));
    for (int k : {4096, 8192}) {
      const long n = weyl_count(model, k, c1v, c2v);
      out.numbers["r4_count_" + fmt(c1v) + "_" + fmt(c2v) + "_k" + std::to_string(k)] = n;
      v.require(n == expected, "r=4 [" + fmt(c1v) + "," + fmt(c2v) + "] k=" + std::to_string(k) + ": " + std::to_string(n) +
                                   " vs " + std::to_string(expected));
    }
  }
  const auto circle = SurfaceModel::circle(3, 2 * kPi);
  const int k = 8192;
  const double scaled = weyl_count(circle, k, 6, 20) * std::pow(k, -1.0 / 3);
  const double p = weyl_prediction(circle, 6, 20);
  out.numbers["circle_scaled_count"] = scaled;
  out.numbers["circle_prediction"] = p;
  v.require(rel(scaled, p) < tol("c7.circle_rel"), "circle count·k^{-1/3}/prediction = " + fmt(scaled / p));
}

void c8(const Context& tol, CheckResult& out, Verdict& v) {
  for (int r : {2, 4, 6}) {
    std::vector<double> scaled;
    for (int k : {16, 64, 256}) {
      const auto s = kodaira_spectrum(SurfaceModel::cp1(r), k);
      out.numbers["zero_modes_r" + std::to_string(r) + "_k" + std::to_string(k)] = s.zero_modes;
      v.require(s.zero_modes == r * k / 2 + 1,
                "r=" + std::to_string(r) + " k=" + std::to_string(k) + " zero modes " + std::to_string(s.zero_modes));
      scaled.push_back(s.first_positive * std::pow(k, -2.0 / r));
    }
    auto sorted = scaled;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[1];
    out.numbers["scaled_gap_r" + std::to_string(r)] = scaled;
    v.require(sorted[0] >= tol("c8.gap_fraction") * median, "r=" + std::to_string(r) + " gap min/median " + fmt(sorted[0] / median));
  }
}

void c9(const Context& tol, CheckResult& out, Verdict& v) {
  const auto model = SurfaceModel::cp1(4);
  const double target = model_heat_diag(4, jet_coefficient(model, Pole::north), 1.0);
  const auto pole = heat_diag(model, 8192, 1.0, 0.0);
  const double ratio = pole.value / std::sqrt(8192.0) / target;
  out.numbers["pole_ratio_k8192"] = ratio;
  v.require(std::abs(ratio - 1.0) < tol("c9.pole_rel"), "pole ratio to model " + fmt(ratio));
  json logs = json::array(), errors = json::array();
  double previous = INFINITY, previous_error = 0.0;
  bool monotone = true;
  for (int k : {512, 1024, 2048}) {
    const auto h = heat_diag(model, k, 1.0, 0.5 * kPi);
    const double scaled = h.log_value + 2.0 * std::log(k);
    logs.push_back(scaled);
    errors.push_back(h.log_error);
    monotone = monotone && scaled + h.log_error < previous - previous_error;
    previous = scaled;
    previous_error = h.log_error;
  }
  out.numbers["generic_log_value_times_k2"] = logs;
  out.numbers["generic_log_errors"] = errors;
  v.require(monotone && previous < std::log(1e-100), "generic ln(value·k²) decreasing to " + fmt(previous));
}

void c10(const Context& tol, CheckResult& out, Verdict& v) {
  r2_tian(tol, out, v, "c10.exact_rel");
  const auto model = SurfaceModel::cp1(4);
  const auto grid = hemisphere_grid(512);
  const auto ks = powers_of_two(6, 12);
  std::vector<double> pot, der, lap;
  for (double k : ks) {
    const auto gap = tian_gap(section_norms(model, static_cast<int>(k), MeasureTag::round), grid);
    pot.push_back(gap.potential / std::log(k));
    der.push_back(gap.derivative);
    lap.push_back(gap.laplacian);
  }
  const double sp = fit_scaling(ks, pot).slope, sd = fit_scaling(ks, der).slope, sl = fit_scaling(ks, lap).slope;
  out.numbers["potential_log_corrected_slope"] = sp;
  out.numbers["derivative_slope"] = sd;
  out.numbers["laplacian_slope"] = sl;
  v.require(std::abs(sp + 1.0) <= tol("c10.potential_slope"), "potential slope " + fmt(sp));
  v.require(sd <= tol("c10.derivative_slope"), "derivative slope " + fmt(sd));
  v.require(sl <= tol("c10.laplacian_slope"), "Laplacian slope " + fmt(sl));
}

void c11(const Context& tol, CheckResult& out, Verdict& v) {
  const auto fs = Symbol::parse("fs_height");
  const double e = std::max(r2_toeplitz_eigen(64), r2_toeplitz_eigen(1024));
  out.numbers["r2_eig_abs"] = e;
  v.require(e < tol("c11.eig_abs"), "r=2 eigenvalues " + fmt(e));
  for (int r : {2, 4}) {
    const auto model = SurfaceModel::cp1(r);
    const std::string tag = "r" + std::to_string(r);
    const double gap = fs.sup_norm() - toeplitz_norm(model, 1024, fs);
    out.numbers[tag + "_norm_gap_k1024"] = gap;
    v.require(gap < tol("c11.norm_gap"), tag + " norm gap " + fmt(gap));
    const auto ks = powers_of_two(5, 9);
    std::vector<double> ds;
    for (double k : ks) ds.push_back(composition_defect(model, static_cast<int>(k), fs, fs));
    const double slope = fit_scaling(ks, ds).slope;
    out.numbers[tag + "_defect_slope"] = slope;
    v.require(slope <= -1.0 / r + tol("c11.defect_slack"), tag + " defect slope " + fmt(slope));
    const double ks512 = szego_measure(model, 512, fs).ks;
    out.numbers[tag + "_szego_ks_k512"] = ks512;
    v.require(ks512 < tol("c11.szego_ks"), tag + " Szegő KS " + fmt(ks512));
    const double trace = assemble_toeplitz(model, 1024, fs).matrix.trace().real() / 1024;
    const double integral = curvature_integral(model, fs);
    out.numbers[tag + "_trace_over_k"] = trace;
    out.numbers[tag + "_curvature_integral"] = integral;
    v.require(rel(trace, integral) < tol("c11.trace_rel"), tag + " trace law " + fmt(trace / integral));
  }
}

void c12(const Context& tol, CheckResult& out, Verdict& v) {
  const auto seed = tol.options.seed;
  const double w = tol("c12.ks");
  const auto s2 = zero_statistics(RandomEnsemble{SurfaceModel::cp1(2), 512, BasisRange::full, seed, 50});
  out.numbers["r2_radial_ks"] = s2.radial_ks;
  out.numbers["r2_angular_ks"] = s2.angular_ks;
  out.numbers["r2_median_modulus"] = s2.median_modulus;
  v.require(s2.radial_ks < w && s2.angular_ks < w, "r=2 KS radial " + fmt(s2.radial_ks) + ", angular " + fmt(s2.angular_ks));
  const auto s4 = zero_statistics(RandomEnsemble{SurfaceModel::cp1(4), 512, BasisRange::full, seed, 50});
  out.numbers["r4_full_radial_ks"] = s4.radial_ks;
  out.numbers["r4_full_angular_ks"] = s4.angular_ks;
  v.require(s4.radial_ks < w, "r=4 full radial KS " + fmt(s4.radial_ks));
  double previous = 0.0;
  for (int k : {256, 1024}) {
    const auto s = zero_statistics(RandomEnsemble{SurfaceModel::cp1(4), k, BasisRange::literal, seed, 50});
    out.numbers["r4_literal_radial_ks_k" + std::to_string(k)] = s.radial_ks;
    out.numbers["r4_literal_expected_cdf_ks_k" + std::to_string(k)] = s.radial_ks_expected;
    previous = s.radial_ks;
  }
  const double first = out.numbers["r4_literal_radial_ks_k256"];
  v.require(previous > tol("c12.literal_gap") && previous >= 0.8 * first,
            "literal range gap " + fmt(first) + " → " + fmt(previous) + " (nonvanishing)");
}

void c13(const Context& tol, CheckResult& out, Verdict& v) {
  for (int r : {2, 4, 6}) {
    const auto p = torsion_coefficients(SurfaceModel::cp1(r));
    out.numbers["A_r" + std::to_string(r)] = p.A;
    out.numbers["B_r" + std::to_string(r)] = p.B;
    out.numbers["B_doubling_change_r" + std::to_string(r)] = p.B_error;
    v.require(std::abs(p.A - r / 8.0) < tol("c13.A_abs"), "A(r=" + std::to_string(r) + ") = " + fmt(p.A));
    if (r == 2) v.require(std::abs(p.B) < tol("c13.B2_abs"), "B(r=2) = " + fmt(p.B));
    if (r == 4) v.require(p.B_error < tol("c13.B4_stable"), "B(r=4) doubling change " + fmt(p.B_error));
  }
}

// The same computations at one and at two worker threads must serialize identically.
json determinism_probe(std::uint64_t seed) {
  json j;
  const auto s = zero_statistics(RandomEnsemble{SurfaceModel::cp1(4), 128, BasisRange::full, seed, 20});
  j["zeros"] = {s.radial_ks, s.radial_ks_expected, s.angular_ks, s.median_modulus};
  j["density"] = expected_zero_density_check(RandomEnsemble{SurfaceModel::cp1(2), 32, BasisRange::full, seed, 100}, 0.5, 2.0).mean_count;
  j["variance"] = variance_audit(RandomEnsemble{SurfaceModel::cp1(4), 16, BasisRange::full, seed, 200}, 0.8).mean;
  json spectrum = json::array();
  for (const auto& sec : spectrum_below(SurfaceModel::cp1(4), 1024, 23 * 32.0, LaplacianKind::bochner))
    spectrum.push_back({sec.m, sec.values});
  j["spectrum"] = spectrum;
  const auto k = kodaira_spectrum(SurfaceModel::cp1(4), 64);
  j["kodaira"] = {k.zero_modes, k.first_positive};
  const auto h = heat_diag(SurfaceModel::cp1(4), 256, 1.0, 0.5 * kPi);
  j["heat"] = {h.log_value, h.sectors};
  j["lambda0"] = lambda0(SurfaceModel::circle(3, 2 * kPi), 512).value;
  j["toeplitz"] = toeplitz_norm(SurfaceModel::cp1(4), 64, Symbol::parse("bump=1,0.5;1:0.3"));
  return j;
}

void c14(const Context& tol, CheckResult& out, Verdict& v) {
  const int saved = thread_count();
  std::string dumps[2];
  try {
    for (int i = 0; i < 2; ++i) {
      set_thread_count(i + 1);
      dumps[i] = determinism_probe(tol.options.seed).dump();
    }
  } catch (...) {
    set_thread_count(saved);
    throw;
  }
  set_thread_count(saved);
  out.numbers["probe"] = json::parse(dumps[0]);
  out.numbers["bytes"] = dumps[0].size();
  v.require(dumps[0] == dumps[1], "probe output identical at 1 and 2 threads");
}

struct Entry {
  const char* id;
  const char* title;
  Tier tier;
  void (*run)(const Context&, CheckResult&, Verdict&);
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries{
      {"s1", "r=2 norms: closed form and quadrature", Tier::smoke, s1},
      {"s2", "r=2 Bergman kernel constant k+1", Tier::smoke, s2},
      {"s3", "r=2 ground state 2πk", Tier::smoke, s3},
      {"s4", "r=2 Kodaira zero modes and gap", Tier::smoke, s4},
      {"s5", "r=2 Tian potential gap ln(k+1)/k", Tier::smoke, s5},
      {"s6", "r=2 Toeplitz eigenvalues and Szegő limit", Tier::smoke, s6},
      {"s7", "r=2 torsion coefficients and dimension", Tier::smoke, s7},
      {"c1", "closed-form norm identity", Tier::full, c1},
      {"c2", "SU(2) constancy", Tier::full, c2},
      {"c3", "Bergman exponents", Tier::full, c3},
      {"c4", "model-constant consistency", Tier::full, c4},
      {"c5", "ground-state scaling", Tier::full, c5},
      {"c6", "ground-state concentration", Tier::full, c6},
      {"c7", "Weyl windows", Tier::full, c7},
      {"c8", "Kodaira gap and dimension", Tier::full, c8},
      {"c9", "heat diagonal", Tier::full, c9},
      {"c10", "Tian rates", Tier::full, c10},
      {"c11", "Toeplitz laws", Tier::full, c11},
      {"c12", "random zeros", Tier::full, c12},
      {"c13", "torsion coefficients", Tier::full, c13},
      {"c14", "determinism across thread counts", Tier::full, c14},
  };
  return entries;
}

}  // namespace

Tier tier_from_string(const std::string& name) {
  if (name == "smoke") return Tier::smoke;
  if (name == "full") return Tier::full;
  throw DomainError("unknown tier '" + name + "' (expected smoke or full)");
}

std::string to_string(Tier tier) { return tier == Tier::smoke ? "smoke" : "full"; }

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t{
      {"s1.norm_rel", 1e-9},       {"s1.exact_rel", 1e-12},          {"s2.rel", 1e-8},
      {"s3.rel", 1e-4},            {"s4.gap_rel", 1e-5},             {"s5.exact_rel", 1e-12},
      {"s6.eig_abs", 1e-10},       {"s6.szego_ks", 0.01},            {"s7.abs", 1e-10},
      {"c1.norm_rel", 1e-9},       {"c1.exact_rel", 1e-12},          {"c2.rel", 1e-8},
      {"c3.slope", 0.02},          {"c4.rel", 0.02},                 {"c5.r2_rel", 1e-4},
      {"c5.r4_rel", 0.02},         {"c5.circle_slope", 0.03},        {"c6.factor", 10.0},
      {"c7.circle_rel", 0.05},     {"c8.gap_fraction", 0.5},         {"c9.pole_rel", 0.03},
      {"c10.exact_rel", 1e-12},    {"c10.potential_slope", 0.05},    {"c10.derivative_slope", -0.6},
      {"c10.laplacian_slope", -0.28}, {"c11.eig_abs", 1e-10},        {"c11.norm_gap", 0.01},
      {"c11.defect_slack", 0.05},  {"c11.szego_ks", 0.02},           {"c11.trace_rel", 0.02},
      {"c12.ks", 0.02},            {"c12.literal_gap", 0.1},         {"c13.A_abs", 1e-10},
      {"c13.B2_abs", 1e-10},       {"c13.B4_stable", 1e-8},
  };
  return t;
}

std::vector<std::string> check_ids(Tier tier) {
  std::vector<std::string> ids;
  for (const auto& e : registry())
    if (e.tier == tier) ids.push_back(e.id);
  return ids;
}

std::vector<CheckResult> run_suite(const SuiteOptions& options, const std::function<void(const CheckResult&)>& progress) {
  Context ctx{options, default_tolerances()};
  for (const auto& [name, value] : options.tolerances) {
    if (!ctx.tol.count(name)) throw DomainError("unknown tolerance '" + name + "'");
    if (!std::isfinite(value)) throw DomainError("tolerance '" + name + "' is not finite");
    ctx.tol[name] = value;
  }
  for (const auto& id : options.only) {
    if (std::none_of(registry().begin(), registry().end(), [&](const Entry& e) { return id == e.id; }))
      throw DomainError("unknown check '" + id + "'");
  }
  std::vector<CheckResult> results;
  for (const auto& e : registry()) {
    if (e.tier != options.tier) continue;
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), e.id) == options.only.end()) continue;
    CheckResult out;
    out.id = e.id;
    out.title = e.title;
    const auto start = std::chrono::steady_clock::now();
    Verdict verdict(out);
    try {
      e.run(ctx, out, verdict);
      verdict.finish();
    } catch (const std::exception& ex) {
      out.passed = false;
      out.errored = true;
      out.detail = std::string("error: ") + ex.what();
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(out);
    if (progress) progress(out);
    if (options.fail_fast && !out.passed) break;
  }
  return results;
}

nlohmann::ordered_json numbers_only(const std::vector<CheckResult>& results) {
  json checks = json::array();
  for (const auto& r : results) checks.push_back({{"id", r.id}, {"passed", r.passed}, {"numbers", r.numbers}});
  return checks;
}

}  // namespace semipos::verify
