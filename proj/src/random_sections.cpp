#include "semipos/random_sections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "semipos/errors.hpp"
#include "semipos/numerics/rng.hpp"
#include "semipos/numerics/roots.hpp"
#include "semipos/numerics/special.hpp"
#include "semipos/numerics/stats.hpp"
#include "semipos/parallel.hpp"

namespace semipos {

namespace {

constexpr double kPi = std::numbers::pi;

void validate(const RandomEnsemble& e) {
  if (e.model.kind() != SurfaceKind::cp1_semipositive) throw DomainError("random_sections: requires the cp1 model");
  if (e.k <= 0) throw DomainError("random_sections: k must be positive");
  if (e.trials <= 0) throw DomainError("random_sections: trials must be positive");
}

// ln ‖z^α‖² for the ω_r measure.
double log_norm(int r, int k, int alpha) {
  const double p = 2.0 * alpha / r;
  return std::log(0.5 * r) + log_beta(p + 1.0, k + 1.0 - p);
}

// ln of s^{2α}/‖z^α‖² for α = 0..degree, at ln s = y.
std::vector<double> log_weights(const RandomEnsemble& e, double y) {
  std::vector<double> w(e.degree() + 1);
  for (int a = 0; a <= e.degree(); ++a) w[a] = 2.0 * a * y - log_norm(e.model.r(), e.k, a);
  return w;
}

}  // namespace

std::string to_string(BasisRange range) { return range == BasisRange::full ? "full" : "literal"; }

BasisRange basis_range_from_string(const std::string& name) {
  if (name == "full") return BasisRange::full;
  if (name == "literal") return BasisRange::literal;
  throw DomainError("unknown basis range '" + name + "' (expected full or literal)");
}

int RandomEnsemble::degree() const { return range == BasisRange::full ? model.r() * k / 2 : k; }

std::vector<std::complex<double>> sample_section(const RandomEnsemble& ensemble, int trial) {
  validate(ensemble);
  if (trial < 0) throw DomainError("sample_section: trial must be non-negative");
  const int d = ensemble.degree();
  auto c = sample_complex_gaussians(mix_seed(ensemble.seed, static_cast<std::uint64_t>(trial)), d + 1);
  for (int a = 0; a <= d; ++a) c[a] *= std::exp(-0.5 * log_norm(ensemble.model.r(), ensemble.k, a));
  return c;
}

std::vector<std::complex<double>> sample_zeros(const RandomEnsemble& ensemble, int trial) {
  return poly_roots(sample_section(ensemble, trial));
}

double limit_radial_cdf(int r, double s) {
  if (s <= 0.0) return 0.0;
  if (std::isinf(s)) return 1.0;
  // s^r/(1+s^r) = 1/(1 + s^{−r}).
  return 1.0 / (1.0 + std::exp(-r * std::log(s)));
}

double expected_radial_cdf(const RandomEnsemble& ensemble, double s) {
  validate(ensemble);
  if (s <= 0.0) return 0.0;
  if (std::isinf(s)) return 1.0;
  // The expected number of zeros in {|z| ≤ s} is s∂_s ln K / 2 with K = Σ s^{2α}/‖z^α‖².
  const auto lw = log_weights(ensemble, std::log(s));
  const double top = *std::max_element(lw.begin(), lw.end());
  double num = 0.0, den = 0.0;
  for (std::size_t a = 0; a < lw.size(); ++a) {
    const double w = std::exp(lw[a] - top);
    num += a * w;
    den += w;
  }
  return num / den / ensemble.degree();
}

ZeroStatistics zero_statistics(const RandomEnsemble& ensemble) {
  validate(ensemble);
  if (ensemble.trials < 10) throw SampleError("zero_statistics: need at least 10 trials");
  const int r = ensemble.model.r();
  struct Trial {
    bool failed = false;
    double radial = 0.0, radial_expected = 0.0, angular = 0.0;
    std::vector<double> moduli;
  };
  std::vector<Trial> results(ensemble.trials);
  parallel_for(ensemble.trials, [&](std::size_t i) {
    Trial& t = results[i];
    std::vector<std::complex<double>> roots;
    try {
      roots = sample_zeros(ensemble, static_cast<int>(i));
    } catch (const IterationError&) {
      t.failed = true;
      return;
    }
    std::vector<double> args;
    for (const auto& z : roots) {
      t.moduli.push_back(std::abs(z));
      double a = std::arg(z);
      if (a < 0.0) a += 2.0 * kPi;
      args.push_back(a);
    }
    t.radial = ks_distance(t.moduli, [&](double s) { return limit_radial_cdf(r, s); });
    t.radial_expected = ks_distance(t.moduli, [&](double s) { return expected_radial_cdf(ensemble, s); });
    t.angular = ks_distance(args, [](double a) { return std::clamp(a / (2.0 * kPi), 0.0, 1.0); });
  });
  ZeroStatistics out;
  out.trials = ensemble.trials;
  out.degree = ensemble.degree();
  std::vector<double> all_moduli;
  int ok = 0;
  for (const auto& t : results) {
    if (t.failed) {
      ++out.failures;
      continue;
    }
    ++ok;
    out.radial_ks += t.radial;
    out.radial_ks_expected += t.radial_expected;
    out.angular_ks += t.angular;
    all_moduli.insert(all_moduli.end(), t.moduli.begin(), t.moduli.end());
  }
  if (out.failures > 0.01 * ensemble.trials)
    throw DataQualityError("zero_statistics: root finder failed on " + std::to_string(out.failures) + " of " +
                           std::to_string(ensemble.trials) + " trials");
  out.radial_ks /= ok;
  out.radial_ks_expected /= ok;
  out.angular_ks /= ok;
  std::sort(all_moduli.begin(), all_moduli.end());
  const std::size_t n = all_moduli.size();
  out.median_modulus = n % 2 ? all_moduli[n / 2] : 0.5 * (all_moduli[n / 2 - 1] + all_moduli[n / 2]);
  return out;
}

ZeroDensityCheck expected_zero_density_check(const RandomEnsemble& ensemble, double inner, double outer) {
  validate(ensemble);
  if (ensemble.trials < 100) throw SampleError("expected_zero_density_check: need at least 100 trials");
  if (!(inner >= 0.0 && outer > inner)) throw DomainError("expected_zero_density_check: need 0 ≤ inner < outer");
  std::vector<double> counts(ensemble.trials);
  std::vector<int> failed(ensemble.trials, 0);
  parallel_for(ensemble.trials, [&](std::size_t i) {
    try {
      const auto roots = sample_zeros(ensemble, static_cast<int>(i));
      counts[i] = static_cast<double>(std::count_if(roots.begin(), roots.end(), [&](const auto& z) {
        const double m = std::abs(z);
        return m > inner && m < outer;
      }));
    } catch (const IterationError&) {
      failed[i] = 1;
    }
  });
  const int failures = std::accumulate(failed.begin(), failed.end(), 0);
  if (failures > 0.01 * ensemble.trials)
    throw DataQualityError("expected_zero_density_check: root finder failed on " + std::to_string(failures) + " trials");
  double sum = 0.0, sum2 = 0.0;
  int n = 0;
  for (int i = 0; i < ensemble.trials; ++i) {
    if (failed[i]) continue;
    sum += counts[i];
    sum2 += counts[i] * counts[i];
    ++n;
  }
  ZeroDensityCheck out;
  out.mean_count = sum / n;
  out.standard_error = std::sqrt(std::max(sum2 / n - out.mean_count * out.mean_count, 0.0) / (n - 1));
  const int d = ensemble.degree();
  out.expected_count = d * (expected_radial_cdf(ensemble, outer) - expected_radial_cdf(ensemble, inner));
  const int r = ensemble.model.r();
  out.limit_count = ensemble.k * 0.5 * r * (limit_radial_cdf(r, outer) - limit_radial_cdf(r, inner));
  out.relative_gap = (out.mean_count - out.limit_count) / out.limit_count;
  return out;
}

VarianceAudit variance_audit(const RandomEnsemble& ensemble, double t) {
  validate(ensemble);
  if (!(t > 0.0) || std::isinf(t)) throw DomainError("variance_audit: need 0 < t < ∞");
  const int r = ensemble.model.r();
  const double y = std::log(t);
  const double log_h = -ensemble.k * std::log1p(std::exp(r * y));
  std::vector<double> values(ensemble.trials);
  parallel_for(ensemble.trials, [&](std::size_t i) {
    const auto c = sample_section(ensemble, static_cast<int>(i));
    std::complex<double> acc = 0.0;
    for (int a = static_cast<int>(c.size()) - 1; a >= 0; --a) acc = acc * t + c[a];
    values[i] = std::norm(acc) * std::exp(log_h);
  });
  VarianceAudit out;
  double sum = 0.0, sum2 = 0.0;
  for (double v : values) {
    sum += v;
    sum2 += v * v;
  }
  const double n = ensemble.trials;
  out.mean = sum / n;
  out.standard_error = std::sqrt(std::max(sum2 / n - out.mean * out.mean, 0.0) / (n - 1));
  double kernel = -std::numeric_limits<double>::infinity();
  for (double lw : log_weights(ensemble, y)) kernel = log_add(kernel, lw);
  out.kernel = std::exp(kernel + log_h);
  return out;
}

}  // namespace semipos
