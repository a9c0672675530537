// semipos: command-line front end for the experiments.
//
// Every subcommand writes <out>/<name>.csv, <out>/<name>.json (resolved
// config, summary and declared checks; no timestamps) and
// <out>/<name>.provenance.json (version, threads, timestamps). --plot adds a
// two-column <name>.dat. Exit codes: 0 ok, 1 a declared check failed,
// 2 usage or config error, 3 numerical failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "semipos/asymptotics.hpp"
#include "semipos/bergman.hpp"
#include "semipos/errors.hpp"
#include "semipos/model_ops.hpp"
#include "semipos/numerics/stats.hpp"
#include "semipos/parallel.hpp"
#include "semipos/random_sections.hpp"
#include "semipos/spectral.hpp"
#include "semipos/surface.hpp"
#include "semipos/toeplitz.hpp"
#include "verify.hpp"

using namespace semipos;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kPi = std::numbers::pi;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// "16..4096" doubles from 16 to 4096; "8,32,128" is a list; "512" a single k.
std::vector<int> parse_schedule(const std::string& text) {
  std::vector<int> ks;
  const auto dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      const long lo = std::stol(text.substr(0, dots)), hi = std::stol(text.substr(dots + 2));
      if (lo <= 0 || hi < lo) throw UsageError("bad k range '" + text + "'");
      for (long k = lo; k <= hi; k *= 2) ks.push_back(static_cast<int>(k));
    } else {
      std::stringstream s(text);
      std::string item;
      while (std::getline(s, item, ',')) ks.push_back(std::stoi(item));
    }
  } catch (const std::logic_error&) {
    throw UsageError("cannot parse k schedule '" + text + "'");
  }
  if (ks.empty() || std::any_of(ks.begin(), ks.end(), [](int k) { return k <= 0; }))
    throw UsageError("k schedule '" + text + "' must list positive integers");
  return ks;
}

// A declared check on a summary field: "field=target:tol", "field<bound" or "field>bound".
struct Expectation {
  std::string text, field;
  char op = '=';
  double target = 0.0, tolerance = 0.0;
};

Expectation parse_expectation(const std::string& text) {
  const auto at = text.find_first_of("=<>");
  if (at == std::string::npos || at == 0) throw UsageError("bad --expect '" + text + "'");
  Expectation e;
  e.text = text;
  e.field = text.substr(0, at);
  e.op = text[at];
  try {
    const std::string rest = text.substr(at + 1);
    if (e.op == '=') {
      const auto colon = rest.find(':');
      if (colon == std::string::npos) throw UsageError("--expect '" + text + "' needs target:tolerance");
      e.target = std::stod(rest.substr(0, colon));
      e.tolerance = std::stod(rest.substr(colon + 1));
    } else {
      e.target = std::stod(rest);
    }
  } catch (const std::logic_error&) {
    throw UsageError("bad number in --expect '" + text + "'");
  }
  return e;
}

SurfaceModel make_model(const std::string& kind, int r, double amplitude) {
  if (kind == "cp1") return SurfaceModel::cp1(r);
  if (kind == "circle") return SurfaceModel::circle(r, amplitude);
  throw UsageError("unknown model '" + kind + "' (expected cp1 or circle)");
}

// Output of one subcommand before it is written.
struct Report {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  json summary = json::object();
  std::vector<std::pair<double, double>> plot;
  std::string plot_columns;
  // Extra files, name → content.
  std::vector<std::pair<std::string, std::string>> extra;
  // Set by verify-all: suite verdicts that decide the exit code.
  std::optional<int> exit_code;

  void row(std::initializer_list<std::string> cells) { rows.emplace_back(cells); }
};

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string iso_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path.string());
  f << content;
}

struct Common {
  std::string out;
  std::string config;
  int threads = 0;
  bool plot = false;
  std::vector<std::string> expect;
};

// --- subcommands ------------------------------------------------------------

struct NormsArgs {
  int r = 2, k = 8;
  std::string measure = "omega_r";
  bool check = false;
};
Report run_norms(const NormsArgs& a) {
  const auto model = SurfaceModel::cp1(a.r);
  const auto basis = section_norms(model, a.k, measure_from_string(a.measure));
  Report rep;
  rep.header = {"alpha", "norm_squared", "log_norm_squared", "measure"};
  double worst = 0.0;
  for (int alpha = 0; alpha <= basis.D; ++alpha) {
    rep.row({std::to_string(alpha), num(basis.norm(alpha)), num(basis.log_norms[alpha]), a.measure});
    if (a.check && basis.measure == MeasureTag::omega_r)
      worst = std::max(worst, std::abs(basis.norm(alpha) / omega_norm_by_quadrature(a.r, a.k, alpha) - 1.0));
    rep.plot.emplace_back(alpha, basis.log_norms[alpha]);
  }
  rep.plot_columns = "alpha log_norm_squared";
  rep.summary["dimension"] = basis.size();
  if (a.check) rep.summary["max_rel_quadrature"] = worst;
  return rep;
}

double parse_point(const std::string& point) {
  if (point == "pole") return 0.0;
  if (point == "equator") return 1.0;
  if (point == "south") return INFINITY;
  try {
    return std::stod(point);
  } catch (const std::logic_error&) {
    throw UsageError("--point must be pole, equator, south or a value of t");
  }
}

struct ScanArgs {
  int r = 4;
  std::string k = "32..8192";
  std::string point = "pole";
  std::string measure = "round";
};
Report run_bergman_scan(const ScanArgs& a) {
  const auto model = SurfaceModel::cp1(a.r);
  const double t = parse_point(a.point);
  const auto ks = parse_schedule(a.k);
  Report rep;
  rep.header = {"k", "t", "bergman_diag_per_unit_measure", "measure"};
  std::vector<double> kd, vals;
  for (int k : ks) {
    const double v = bergman_diag(section_norms(model, k, measure_from_string(a.measure)), t);
    rep.row({std::to_string(k), num(t), num(v), a.measure});
    kd.push_back(k);
    vals.push_back(v);
    rep.plot.emplace_back(std::log(k), std::log(v));
  }
  rep.plot_columns = "ln_k ln_bergman_diag";
  if (ks.size() >= 5) {
    const auto fit = fit_scaling(kd, vals);
    rep.summary["slope"] = fit.slope;
    rep.summary["intercept"] = fit.intercept;
    rep.summary["max_residual"] = fit.max_residual;
    rep.summary["expansion_exponent"] = fit.expansion_exponent;
    rep.summary["leading_constant"] = fit.leading_constant;
  }
  rep.summary["exponent_at_point"] = 2.0 / vanishing_order(model, t);
  if ((t == 0.0 || std::isinf(t)) && a.measure == "round") {
    const double c0 = model_kernel_diag(a.r, jet_coefficient(model, Pole::north));
    rep.summary["model_kernel_diag"] = c0;
    rep.summary["last_ratio_to_model"] = vals.back() * std::pow(kd.back(), -2.0 / a.r) / c0;
  }
  return rep;
}

struct TianArgs {
  int r = 4;
  std::string k = "64..4096";
  int grid = 512;
  std::string measure = "round";
};
Report run_tian(const TianArgs& a) {
  const auto model = SurfaceModel::cp1(a.r);
  const auto grid = hemisphere_grid(a.grid);
  Report rep;
  rep.header = {"k", "potential_gap", "derivative_gap", "laplacian_gap", "measure"};
  std::vector<double> kd, pot, der, lap;
  double exact = 0.0;
  for (int k : parse_schedule(a.k)) {
    const auto g = tian_gap(section_norms(model, k, measure_from_string(a.measure)), grid);
    rep.row({std::to_string(k), num(g.potential), num(g.derivative), num(g.laplacian), a.measure});
    kd.push_back(k);
    pot.push_back(g.potential / std::log(k));
    der.push_back(g.derivative);
    lap.push_back(g.laplacian);
    exact = std::max(exact, std::abs(g.potential / (std::log(k + 1.0) / k) - 1.0));
    rep.plot.emplace_back(std::log(k), std::log(g.potential));
  }
  rep.plot_columns = "ln_k ln_potential_gap";
  if (a.r == 2) rep.summary["potential_rel_to_ln(k+1)/k"] = exact;
  if (kd.size() >= 5) {
    rep.summary["potential_log_corrected_slope"] = fit_scaling(kd, pot).slope;
    rep.summary["derivative_slope"] = fit_scaling(kd, der).slope;
    rep.summary["laplacian_slope"] = fit_scaling(kd, lap).slope;
  }
  return rep;
}

struct SpectralArgs {
  std::string model = "cp1";
  int r = 4;
  double amplitude = 2 * kPi;
  std::string k = "256..8192";
  double c1 = 8, c2 = 16;
};
Report run_lambda0(const SpectralArgs& a) {
  const auto model = make_model(a.model, a.r, a.amplitude);
  Report rep;
  rep.header = {"k", "lambda0", "error", "sector", "lambda0_times_k^(-2/r)"};
  std::vector<double> kd, vals;
  for (int k : parse_schedule(a.k)) {
    const auto l = lambda0(model, k);
    const double scaled = l.value * std::pow(k, -2.0 / a.r);
    rep.row({std::to_string(k), num(l.value), num(l.error), std::to_string(l.sector), num(scaled)});
    kd.push_back(k);
    vals.push_back(l.value);
    rep.plot.emplace_back(k, scaled);
  }
  rep.plot_columns = "k lambda0_scaled";
  if (a.r > 2 || a.model == "circle") {
    const double C = lambda0_model_constant(model);
    rep.summary["model_constant"] = C;
    rep.summary["last_ratio_to_model"] = vals.back() * std::pow(kd.back(), -2.0 / a.r) / C;
    if (kd.size() >= 5) {
      const auto probe = lambda0_expansion_probe(kd, vals, a.r, C);
      rep.summary["correction_exponent"] = probe.exponent;
      rep.summary["correction_indeterminate"] = probe.indeterminate;
    }
  }
  if (kd.size() >= 5) rep.summary["slope"] = fit_scaling(kd, vals).slope;
  rep.summary["expected_exponent"] = 2.0 / a.r;
  return rep;
}

Report run_weyl(const SpectralArgs& a) {
  const auto model = make_model(a.model, a.r, a.amplitude);
  const double d = model.kind() == SurfaceKind::circle_degenerate ? 1.0 / a.r : 0.0;
  const double p = weyl_prediction(model, a.c1, a.c2);
  Report rep;
  rep.header = {"k", "count", "count_times_k^(-d)", "prediction", "window_c1", "window_c2"};
  double last = 0.0;
  for (int k : parse_schedule(a.k)) {
    const long n = weyl_count(model, k, a.c1, a.c2);
    last = n * std::pow(k, -d);
    rep.row({std::to_string(k), std::to_string(n), num(last), num(p), num(a.c1), num(a.c2)});
    rep.plot.emplace_back(k, last);
  }
  rep.plot_columns = "k scaled_count";
  rep.summary["prediction"] = p;
  rep.summary["count_exponent"] = d;
  rep.summary["last_scaled_count"] = last;
  rep.summary["last_ratio_to_prediction"] = last / p;
  return rep;
}

struct GapArgs {
  int r = 4;
  std::string k = "16,64,256";
  bool skip_zero_modes = false;
};
Report run_gap(const GapArgs& a) {
  const auto model = SurfaceModel::cp1(a.r);
  Report rep;
  rep.header = {"k", "zero_modes", "riemann_roch", "first_positive", "first_positive_times_k^(-2/r)", "most_negative"};
  std::vector<double> scaled;
  bool dims = true;
  for (int k : parse_schedule(a.k)) {
    const auto s = kodaira_spectrum(model, k, !a.skip_zero_modes);
    const long rr = riemann_roch_dim(model, k);
    const double sc = s.first_positive * std::pow(k, -2.0 / a.r);
    if (!a.skip_zero_modes) dims = dims && s.zero_modes == rr;
    scaled.push_back(sc);
    rep.row({std::to_string(k), std::to_string(s.zero_modes), std::to_string(rr), num(s.first_positive), num(sc),
             num(s.most_negative)});
    rep.plot.emplace_back(k, sc);
  }
  rep.plot_columns = "k scaled_gap";
  auto sorted = scaled;
  std::sort(sorted.begin(), sorted.end());
  rep.summary["min_over_median_scaled_gap"] = sorted.front() / sorted[sorted.size() / 2];
  if (!a.skip_zero_modes) rep.summary["zero_modes_match_riemann_roch"] = dims ? 1 : 0;
  return rep;
}

struct HeatArgs {
  int r = 4;
  std::string k = "512,2048,8192";
  double time = 1.0;
  std::string point = "pole";
};
Report run_heat(const HeatArgs& a) {
  const auto model = SurfaceModel::cp1(a.r);
  double theta;
  if (a.point == "pole") theta = 0.0;
  else if (a.point == "equator") theta = 0.5 * kPi;
  else {
    try {
      theta = std::stod(a.point);
    } catch (const std::logic_error&) {
      throw UsageError("--point must be pole, equator or a polar angle");
    }
  }
  Report rep;
  rep.header = {"k", "theta", "heat_diag_per_reference_area", "log_value", "log_error", "sectors", "value_times_k^(-2/r)",
                "log_value_plus_2ln_k"};
  double last_scaled = 0.0;
  bool monotone = true;
  double previous = INFINITY;
  for (int k : parse_schedule(a.k)) {
    const auto h = heat_diag(model, k, a.time, theta);
    last_scaled = h.value * std::pow(k, -2.0 / a.r);
    const double lk2 = h.log_value + 2.0 * std::log(k);
    monotone = monotone && lk2 < previous;
    previous = lk2;
    rep.row({std::to_string(k), num(theta), num(h.value), num(h.log_value), num(h.log_error), std::to_string(h.sectors),
             num(last_scaled), num(lk2)});
    rep.plot.emplace_back(k, h.log_value);
  }
  rep.plot_columns = "k ln_heat_diag";
  if (theta == 0.0 || theta == kPi) {
    const double target = model_heat_diag(a.r, jet_coefficient(model, Pole::north), a.time);
    rep.summary["model_heat_diag"] = target;
    rep.summary["last_ratio_to_model"] = last_scaled / target;
  } else {
    rep.summary["log_value_times_k2_decreasing"] = monotone ? 1 : 0;
    rep.summary["last_log_value_times_k2"] = previous;
  }
  return rep;
}

struct ConcentrationArgs {
  int r = 4;
  std::string k = "512,4096";
  double radius = 0.5;
};
Report run_concentration(const ConcentrationArgs& a) {
  const auto model = SurfaceModel::cp1(a.r);
  Report rep;
  rep.header = {"k", "mass_outside", "log_mass_outside", "sector", "radius_t"};
  std::vector<double> logs;
  for (int k : parse_schedule(a.k)) {
    const auto c = ground_state_concentration(model, k, a.radius);
    rep.row({std::to_string(k), num(c.mass), num(c.log_mass), std::to_string(c.sector), num(a.radius)});
    logs.push_back(c.log_mass);
    rep.plot.emplace_back(k, c.log_mass);
  }
  rep.plot_columns = "k ln_mass_outside";
  rep.summary["log_drop_first_to_last"] = logs.front() - logs.back();
  return rep;
}

struct ToeplitzArgs {
  int r = 4;
  std::string k = "1024";
  std::string symbol = "fs_height";
  std::string second = "";
  std::string what = "norm";
  std::string measure = "omega_r";
  double t = 0.0;
};
Report run_toeplitz(const ToeplitzArgs& a) {
  const auto model = SurfaceModel::cp1(a.r);
  const auto f = Symbol::parse(a.symbol);
  const auto tag = measure_from_string(a.measure);
  const auto ks = parse_schedule(a.k);
  Report rep;
  std::vector<double> kd, vals;
  rep.summary["symbol"] = f.describe();
  rep.summary["sup_norm"] = f.sup_norm();
  if (a.what == "norm") {
    rep.header = {"k", "norm", "sup_norm", "gap"};
    for (int k : ks) {
      const double n = toeplitz_norm(model, k, f, tag);
      rep.row({std::to_string(k), num(n), num(f.sup_norm()), num(f.sup_norm() - n)});
      kd.push_back(k);
      vals.push_back(f.sup_norm() - n);
    }
    rep.summary["last_gap"] = vals.back();
  } else if (a.what == "compose") {
    const auto g = a.second.empty() ? f : Symbol::parse(a.second);
    rep.header = {"k", "composition_defect"};
    for (int k : ks) {
      const double d = composition_defect(model, k, f, g, tag);
      rep.row({std::to_string(k), num(d)});
      kd.push_back(k);
      vals.push_back(d);
    }
    rep.summary["last_defect"] = vals.back();
    rep.summary["bound_exponent"] = -1.0 / a.r;
  } else if (a.what == "szego") {
    rep.header = {"k", "index", "eigenvalue", "pushforward_cdf_at_eigenvalue"};
    for (int k : ks) {
      const auto s = szego_measure(model, k, f, tag);
      for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
        rep.row({std::to_string(k), std::to_string(i), num(s.eigenvalues[i]), num(pushforward_cdf(model, f, s.eigenvalues[i]))});
      kd.push_back(k);
      vals.push_back(s.ks);
    }
    rep.summary["last_ks"] = vals.back();
  } else if (a.what == "diag") {
    rep.header = {"k", "t", "toeplitz_diag_over_bergman_diag", "symbol_value"};
    for (int k : ks) {
      const double v = toeplitz_diag_ratio(model, k, f, a.t, tag);
      rep.row({std::to_string(k), num(a.t), num(v), num(f.radial_value(a.t))});
      kd.push_back(k);
      vals.push_back(std::abs(v - f.radial_value(a.t)));
    }
    rep.summary["last_abs_error"] = vals.back();
  } else if (a.what == "trace") {
    const double integral = curvature_integral(model, f);
    rep.header = {"k", "trace_over_k", "curvature_integral"};
    for (int k : ks) {
      const double tr = assemble_toeplitz(model, k, f, tag).matrix.trace().real() / k;
      rep.row({std::to_string(k), num(tr), num(integral)});
      kd.push_back(k);
      vals.push_back(std::abs(tr / integral - 1.0));
    }
    rep.summary["last_rel_error"] = vals.back();
  } else {
    throw UsageError("--what must be norm, compose, szego, diag or trace");
  }
  for (std::size_t i = 0; i < kd.size(); ++i)
    if (vals[i] > 0.0) rep.plot.emplace_back(std::log(kd[i]), std::log(vals[i]));
  rep.plot_columns = "ln_k ln_quantity";
  if (kd.size() >= 5 && std::all_of(vals.begin(), vals.end(), [](double v) { return v > 0.0; }))
    rep.summary["slope"] = fit_scaling(kd, vals).slope;
  return rep;
}

struct ZerosArgs {
  int r = 2;
  std::string k = "512";
  int trials = 50;
  std::uint64_t seed = 1;
  std::string range = "full";
  bool roots = false;
};
Report run_random_zeros(const ZerosArgs& a) {
  Report rep;
  rep.header = {"k", "degree", "range", "trials", "failures", "radial_ks_vs_limit", "radial_ks_vs_finite_k", "angular_ks",
                "median_modulus"};
  std::vector<double> kd, vals;
  for (int k : parse_schedule(a.k)) {
    const RandomEnsemble e{SurfaceModel::cp1(a.r), k, basis_range_from_string(a.range), a.seed, a.trials};
    const auto s = zero_statistics(e);
    rep.row({std::to_string(k), std::to_string(s.degree), a.range, std::to_string(s.trials), std::to_string(s.failures),
             num(s.radial_ks), num(s.radial_ks_expected), num(s.angular_ks), num(s.median_modulus)});
    kd.push_back(s.degree);
    vals.push_back(s.radial_ks);
    rep.summary["radial_ks"] = s.radial_ks;
    rep.summary["radial_ks_finite_k"] = s.radial_ks_expected;
    rep.summary["angular_ks"] = s.angular_ks;
    rep.summary["median_modulus"] = s.median_modulus;
    rep.plot.emplace_back(s.degree, s.radial_ks);
    if (a.roots) {
      std::string csv = "trial,re,im,modulus,argument\n";
      for (int i = 0; i < a.trials; ++i)
        for (const auto& z : sample_zeros(e, i))
          csv += std::to_string(i) + "," + num(z.real()) + "," + num(z.imag()) + "," + num(std::abs(z)) + "," + num(std::arg(z)) + "\n";
      rep.extra.emplace_back("roots_k" + std::to_string(k) + ".csv", csv);
    }
  }
  rep.plot_columns = "degree radial_ks";
  return rep;
}

struct TorsionArgs {
  std::string r = "2,4,6";
};
Report run_torsion(const TorsionArgs& a) {
  Report rep;
  rep.header = {"r", "A_coefficient_of_minus_k_ln_k", "B_coefficient_of_minus_k", "A_change_on_doubling", "B_change_on_doubling",
                "nodes"};
  for (int r : parse_schedule(a.r)) {
    const auto p = torsion_coefficients(SurfaceModel::cp1(r));
    rep.row({std::to_string(r), num(p.A), num(p.B), num(p.A_error), num(p.B_error), std::to_string(p.nodes)});
    rep.summary["A_r" + std::to_string(r)] = p.A;
    rep.summary["B_r" + std::to_string(r)] = p.B;
    rep.plot.emplace_back(r, p.B);
  }
  rep.plot_columns = "r B";
  return rep;
}

struct ModelArgs {
  int r = 4;
  double B0 = 0.0;
  double time = 1.0;
  double c1 = 0.0, c2 = 0.0;
};
Report run_model(const ModelArgs& a) {
  const double B0 = a.B0 > 0.0 ? a.B0 : jet_coefficient(SurfaceModel::cp1(a.r), Pole::north);
  Report rep;
  rep.header = {"quantity", "value", "r", "B0"};
  auto add = [&](const std::string& name, double v) {
    rep.row({name, num(v), std::to_string(a.r), num(B0)});
    rep.summary[name] = v;
  };
  add("kernel_diag_dxdy", model_kernel_diag(a.r, B0));
  add("bochner_lambda0", model_bochner_lambda0(a.r, B0).value);
  add("heat_diag_dxdy", model_heat_diag(a.r, B0, a.time));
  if (a.r == 2) add("mehler_heat_diag_dxdy", mehler_heat_diag(B0, a.time));
  if (a.c2 > a.c1) add("count_in_window", static_cast<double>(model_counting(a.r, B0, a.c1, a.c2)));
  return rep;
}

struct VerifyArgs {
  std::string tier = "smoke";
  bool fail_fast = false;
  std::uint64_t seed = 20240611;
  std::vector<std::string> tolerance;
  std::vector<std::string> only;
};
Report run_verify(const VerifyArgs& a) {
  verify::SuiteOptions opt;
  opt.tier = verify::tier_from_string(a.tier);
  opt.fail_fast = a.fail_fast;
  opt.seed = a.seed;
  opt.only = a.only;
  for (const auto& t : a.tolerance) {
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw UsageError("--tolerance expects name=value, got '" + t + "'");
    try {
      opt.tolerances[t.substr(0, eq)] = std::stod(t.substr(eq + 1));
    } catch (const std::logic_error&) {
      throw UsageError("bad tolerance value in '" + t + "'");
    }
  }
  const auto results = verify::run_suite(opt, [](const verify::CheckResult& r) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.id << " " << r.title << ": " << r.detail << std::endl;
  });
  Report rep;
  rep.header = {"id", "title", "passed", "detail"};
  int failed = 0, errored = 0;
  json times = json::object();
  for (const auto& r : results) {
    rep.row({r.id, r.title, r.passed ? "1" : "0", r.detail});
    failed += !r.passed;
    errored += r.errored;
    times[r.id] = r.seconds;
  }
  rep.summary["tier"] = a.tier;
  rep.summary["checks_run"] = results.size();
  rep.summary["checks_failed"] = failed;
  rep.summary["checks"] = verify::numbers_only(results);
  rep.extra.emplace_back("verify-all.timings.json", times.dump(2) + "\n");
  rep.exit_code = errored ? 3 : failed ? 1 : 0;
  return rep;
}

// --- plumbing -----------------------------------------------------------------

// Turns JSON config keys into command-line arguments for options the
// command line does not already set. Unknown keys are rejected.
std::vector<std::string> config_arguments(CLI::App* sub, const std::string& path, const std::vector<std::string>& given) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config " + path);
  json cfg;
  try {
    cfg = json::parse(f);
  } catch (const json::parse_error& e) {
    throw UsageError("config " + path + " is not valid JSON: " + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config must be a JSON object");
  std::vector<std::string> args;
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    CLI::Option* opt = sub->get_option_no_throw(flag);
    if (!opt || key == "config") throw UsageError("unknown config key '" + key + "' for " + sub->get_name());
    if (std::any_of(given.begin(), given.end(), [&](const std::string& g) { return g == flag || g.rfind(flag + "=", 0) == 0; }))
      continue;
    auto scalar = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& item : value) args.insert(args.end(), {flag, scalar(item)});
    } else if (value.is_object()) {
      for (const auto& [name, item] : value.items()) args.insert(args.end(), {flag, name + "=" + scalar(item)});
    } else {
      args.insert(args.end(), {flag, scalar(value)});
    }
  }
  return args;
}

// Numbers stay numbers in the resolved config; everything else is a string.
json typed(const std::string& text) {
  const json parsed = json::parse(text, nullptr, false);
  return parsed.is_number() ? parsed : json(text);
}

json resolved_config(CLI::App* sub) {
  json cfg = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const auto& names = opt->get_lnames();
    if (names.empty()) continue;
    const std::string& name = names.front();
    // Location and parallelism do not change the numbers.
    if (name == "help" || name == "config" || name == "out" || name == "threads" || name == "plot") continue;
    const bool flag = opt->get_items_expected_max() == 0;
    const bool list = opt->get_expected_max() > 1;
    if (flag) {
      cfg[name] = opt->count() > 0;
    } else if (list) {
      cfg[name] = opt->results();
    } else {
      cfg[name] = typed(opt->count() == 0 ? opt->get_default_str() : opt->results().back());
    }
  }
  return cfg;
}

int emit(const std::string& name, CLI::App* sub, const Common& common, Report rep, const std::string& started,
         double seconds, const std::string& command_line) {
  std::string out = common.out;
  if (out.empty()) {
    const char* env = std::getenv("SEMIPOS_OUT_DIR");
    out = env && *env ? env : "semipos_out";
  }
  const std::filesystem::path dir(out);
  std::filesystem::create_directories(dir);

  std::string csv;
  for (std::size_t i = 0; i < rep.header.size(); ++i) csv += (i ? "," : "") + csv_cell(rep.header[i]);
  csv += "\n";
  for (const auto& row : rep.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) csv += (i ? "," : "") + csv_cell(row[i]);
    csv += "\n";
  }
  write_file(dir / (name + ".csv"), csv);

  json checks = json::array();
  bool all_pass = true;
  for (const auto& text : common.expect) {
    const auto e = parse_expectation(text);
    if (!rep.summary.contains(e.field) || !rep.summary[e.field].is_number())
      throw UsageError("--expect names '" + e.field + "', which is not a numeric summary field");
    const double value = rep.summary[e.field].get<double>();
    const bool ok = e.op == '=' ? std::abs(value - e.target) <= e.tolerance : e.op == '<' ? value < e.target : value > e.target;
    all_pass = all_pass && ok;
    checks.push_back({{"expect", e.text}, {"value", value}, {"passed", ok}});
    std::cout << (ok ? "PASS " : "FAIL ") << e.text << " (value " << num(value) << ")" << std::endl;
  }

  json report;
  report["command"] = name;
  report["config"] = resolved_config(sub);
  report["summary"] = rep.summary;
  report["checks"] = checks;
  write_file(dir / (name + ".json"), report.dump(2) + "\n");

  json prov;
  prov["version"] = kVersion;
  prov["command_line"] = command_line;
  prov["threads"] = thread_count();
  prov["output_directory"] = std::filesystem::absolute(dir).string();
  prov["started"] = started;
  prov["finished"] = iso_now();
  prov["seconds"] = seconds;
  write_file(dir / (name + ".provenance.json"), prov.dump(2) + "\n");

  if (common.plot && !rep.plot.empty()) {
    std::string dat = "# " + rep.plot_columns + "\n";
    for (const auto& [x, y] : rep.plot) dat += num(x) + " " + num(y) + "\n";
    write_file(dir / (name + ".dat"), dat);
  }
  for (const auto& [file, content] : rep.extra) write_file(dir / file, content);

  for (const auto& [key, value] : rep.summary.items())
    if (key != "checks") std::cout << key << " = " << value.dump() << "\n";
  std::cout << "wrote " << (dir / (name + ".csv")).string() << std::endl;

  if (rep.exit_code && *rep.exit_code != 0) return *rep.exit_code;
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments on semi-positive line bundles over the sphere"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  std::map<std::string, Common> common;
  std::map<std::string, std::function<Report()>> runners;

  auto add_common = [&](CLI::App* sub) {
    Common& c = common[sub->get_name()];
    sub->add_option("--out", c.out, "Output directory (default $SEMIPOS_OUT_DIR or ./semipos_out)");
    sub->add_option("--config", c.config, "JSON file whose keys are option names");
    sub->add_option("--threads", c.threads, "Worker threads (default $SEMIPOS_THREADS or 1)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--plot", c.plot, "Also write a two-column .dat file");
    sub->add_option("--expect", c.expect, "Declared check on a summary field: f=target:tol, f<bound or f>bound");
  };

  NormsArgs norms;
  {
    auto* s = app.add_subcommand("norms", "Monomial norms ‖z^α‖²");
    s->add_option("--r", norms.r)->check(CLI::Range(2, 64));
    s->add_option("--k", norms.k)->check(CLI::PositiveNumber);
    s->add_option("--measure", norms.measure)->check(CLI::IsMember({"omega_r", "round"}));
    s->add_flag("--check-quadrature", norms.check, "Compare omega_r closed forms with quadrature");
    add_common(s);
    runners["norms"] = [&] { return run_norms(norms); };
  }
  ScanArgs scan;
  {
    auto* s = app.add_subcommand("bergman-scan", "Bergman kernel diagonal over a k schedule");
    s->add_option("--r", scan.r)->check(CLI::Range(2, 64));
    s->add_option("--k", scan.k, "k schedule: a..b (doubling) or a,b,c");
    s->add_option("--point", scan.point, "pole, equator, south or t");
    s->add_option("--measure", scan.measure)->check(CLI::IsMember({"omega_r", "round"}));
    add_common(s);
    runners["bergman-scan"] = [&] { return run_bergman_scan(scan); };
  }
  TianArgs tian;
  {
    auto* s = app.add_subcommand("tian", "Induced Fubini–Study gaps");
    s->add_option("--r", tian.r)->check(CLI::Range(2, 64));
    s->add_option("--k", tian.k);
    s->add_option("--grid", tian.grid)->check(CLI::Range(8, 1 << 16));
    s->add_option("--measure", tian.measure)->check(CLI::IsMember({"omega_r", "round"}));
    add_common(s);
    runners["tian"] = [&] { return run_tian(tian); };
  }
  SpectralArgs l0, weyl;
  weyl.k = "4096,8192";
  for (auto [name, args] : {std::pair{"lambda0-scan", &l0}, {"weyl", &weyl}}) {
    auto* s = app.add_subcommand(name, std::string(name) == "weyl" ? "Eigenvalue counts in [c1 k^{2/r}, c2 k^{2/r})"
                                                                    : "Bottom of the Bochner spectrum");
    s->add_option("--model", args->model)->check(CLI::IsMember({"cp1", "circle"}));
    s->add_option("--r", args->r)->check(CLI::Range(2, 64));
    s->add_option("--amplitude", args->amplitude, "Field amplitude of the circle model");
    s->add_option("--k", args->k);
    if (std::string(name) == "weyl") {
      s->add_option("--c1", args->c1);
      s->add_option("--c2", args->c2);
      runners[name] = [&] { return run_weyl(weyl); };
    } else {
      runners[name] = [&] { return run_lambda0(l0); };
    }
    add_common(s);
  }
  GapArgs gap;
  {
    auto* s = app.add_subcommand("gap", "Kodaira zero modes and first positive eigenvalue");
    s->add_option("--r", gap.r)->check(CLI::Range(2, 64));
    s->add_option("--k", gap.k);
    s->add_flag("--skip-zero-modes", gap.skip_zero_modes, "Only solve the sectors near the poles");
    add_common(s);
    runners["gap"] = [&] { return run_gap(gap); };
  }
  HeatArgs heat;
  {
    auto* s = app.add_subcommand("heat", "Heat kernel diagonal at time t/k^{2/r}");
    s->add_option("--r", heat.r)->check(CLI::Range(2, 64));
    s->add_option("--k", heat.k);
    s->add_option("--time", heat.time)->check(CLI::PositiveNumber);
    s->add_option("--point", heat.point, "pole, equator or a polar angle");
    add_common(s);
    runners["heat"] = [&] { return run_heat(heat); };
  }
  ConcentrationArgs conc;
  {
    auto* s = app.add_subcommand("concentration", "Ground-state mass away from the poles");
    s->add_option("--r", conc.r)->check(CLI::Range(2, 64));
    s->add_option("--k", conc.k);
    s->add_option("--radius", conc.radius)->check(CLI::PositiveNumber);
    add_common(s);
    runners["concentration"] = [&] { return run_concentration(conc); };
  }
  ToeplitzArgs toe;
  {
    auto* s = app.add_subcommand("toeplitz", "Toeplitz operator experiments");
    s->add_option("--r", toe.r)->check(CLI::Range(2, 64));
    s->add_option("--k", toe.k);
    s->add_option("--symbol", toe.symbol, "e.g. fs_height, bump=1,0.3;1:0.5");
    s->add_option("--second", toe.second, "Second symbol for --what compose (default: the first)");
    s->add_option("--what", toe.what)->check(CLI::IsMember({"norm", "compose", "szego", "diag", "trace"}));
    s->add_option("--measure", toe.measure)->check(CLI::IsMember({"omega_r", "round"}));
    s->add_option("--t", toe.t, "Point |z| for --what diag");
    add_common(s);
    runners["toeplitz"] = [&] { return run_toeplitz(toe); };
  }
  ZerosArgs zeros;
  {
    auto* s = app.add_subcommand("random-zeros", "Zeros of Gaussian random sections");
    s->add_option("--r", zeros.r)->check(CLI::Range(2, 64));
    s->add_option("--k", zeros.k);
    s->add_option("--trials", zeros.trials)->check(CLI::Range(10, 1 << 20));
    s->add_option("--seed", zeros.seed);
    s->add_option("--range", zeros.range)->check(CLI::IsMember({"full", "literal"}));
    s->add_flag("--roots", zeros.roots, "Write every root to roots_k<k>.csv");
    add_common(s);
    runners["random-zeros"] = [&] { return run_random_zeros(zeros); };
  }
  TorsionArgs tor;
  {
    auto* s = app.add_subcommand("torsion-coeffs", "Leading torsion coefficients A and B");
    s->add_option("--r", tor.r, "List of r");
    add_common(s);
    runners["torsion-coeffs"] = [&] { return run_torsion(tor); };
  }
  ModelArgs model;
  {
    auto* s = app.add_subcommand("model", "Tangent-plane model constants");
    s->add_option("--r", model.r)->check(CLI::Range(2, 64));
    s->add_option("--B0", model.B0, "Jet coefficient (default: the cp1 pole value)");
    s->add_option("--time", model.time)->check(CLI::PositiveNumber);
    s->add_option("--c1", model.c1);
    s->add_option("--c2", model.c2);
    add_common(s);
    runners["model"] = [&] { return run_model(model); };
  }
  VerifyArgs ver;
  {
    auto* s = app.add_subcommand("verify-all", "Run the acceptance suite");
    s->add_option("--tier", ver.tier)->check(CLI::IsMember({"smoke", "full"}));
    s->add_flag("--fail-fast", ver.fail_fast);
    s->add_option("--seed", ver.seed);
    s->add_option("--tolerance", ver.tolerance, "Override a named tolerance: name=value");
    s->add_option("--only", ver.only, "Run only these check ids");
    add_common(s);
    runners["verify-all"] = [&] { return run_verify(ver); };
  }

  std::vector<std::string> args(argv + 1, argv + argc);
  std::string command_line = argv[0];
  for (const auto& a : args) command_line += " " + a;
  const auto started = iso_now();
  const auto t0 = std::chrono::steady_clock::now();
  try {
    // Fold a --config file into the arguments before parsing.
    for (std::size_t i = 0; i < args.size(); ++i) {
      CLI::App* sub = app.get_subcommand_no_throw(args[i]);
      if (!sub) continue;
      std::string path;
      for (std::size_t j = i + 1; j < args.size(); ++j) {
        if (args[j] == "--config" && j + 1 < args.size()) path = args[j + 1];
        else if (args[j].rfind("--config=", 0) == 0) path = args[j].substr(9);
      }
      if (!path.empty()) {
        const auto extra = config_arguments(sub, path, args);
        args.insert(args.end(), extra.begin(), extra.end());
      }
      break;
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  const Common& c = common[name];
  if (c.threads > 0) set_thread_count(c.threads);
  try {
    Report rep = runners[name]();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return emit(name, sub, c, std::move(rep), started, seconds, command_line);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const SampleError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
