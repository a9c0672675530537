#include "semipos/numerics/stats.hpp"

#include <algorithm>
#include <cmath>

#include "semipos/errors.hpp"

namespace semipos {

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf,
                   const std::function<double(double)>& cdf_left) {
  if (sample.empty()) throw SampleError("ks_distance: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < sample.size()) {
    // Group ties: the empirical CDF jumps from i/n to j/n at x.
    std::size_t j = i;
    while (j < sample.size() && sample[j] == sample[i]) ++j;
    const double x = sample[i];
    const double f = cdf(x);
    const double f_left = cdf_left ? cdf_left(x) : f;
    d = std::max(d, std::abs(j / n - f));
    d = std::max(d, std::abs(i / n - f_left));
    i = j;
  }
  return d;
}

LinearFit ols(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw SampleError("ols: need at least two paired points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw SampleError("ols: degenerate abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    rss += r * r;
    fit.max_residual = std::max(fit.max_residual, std::abs(r));
  }
  fit.slope_stderr = n > 2 ? std::sqrt(rss / (n - 2) / sxx) : 0.0;
  return fit;
}

double golden_section_minimize(const std::function<double(double)>& f, double a, double b, double tolerance,
                               double* f_min) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (std::abs(b - a) > tolerance) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  if (f_min) *f_min = f(x);
  return x;
}

namespace {

// Relative least squares for value ≈ A k^p + C at fixed p.
struct ProjectedFit {
  double amplitude, offset, cost;
};

ProjectedFit project(const std::vector<double>& ks, const std::vector<double>& values, double p) {
  // Minimize Σ ((A k^p + C)/v − 1)².
  double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double f1 = std::pow(ks[i], p) / values[i];
    const double f2 = 1.0 / values[i];
    s11 += f1 * f1;
    s12 += f1 * f2;
    s22 += f2 * f2;
    b1 += f1;
    b2 += f2;
  }
  const double det = s11 * s22 - s12 * s12;
  ProjectedFit out{0.0, 0.0, 0.0};
  if (std::abs(det) < 1e-300) {
    out.amplitude = b1 / s11;
  } else {
    out.amplitude = (b1 * s22 - b2 * s12) / det;
    out.offset = (s11 * b2 - s12 * b1) / det;
  }
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double r = (out.amplitude * std::pow(ks[i], p) + out.offset) / values[i] - 1.0;
    out.cost += r * r;
  }
  return out;
}

}  // namespace

ExponentFit fit_scaling(const std::vector<double>& ks, const std::vector<double>& values) {
  if (ks.size() != values.size()) throw SampleError("fit_scaling: size mismatch");
  if (ks.size() < 5) throw SampleError("fit_scaling: need at least five values of k");
  ExponentFit fit;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (!(ks[i] > 0.0) || !(values[i] > 0.0)) throw SampleError("fit_scaling: values must be positive");
    fit.log_k.push_back(std::log(ks[i]));
    fit.log_value.push_back(std::log(values[i]));
  }
  const LinearFit lin = ols(fit.log_k, fit.log_value);
  fit.slope = lin.slope;
  fit.intercept = lin.intercept;
  fit.max_residual = lin.max_residual;

  fit.rounded_slope = std::round(lin.slope * 12.0) / 12.0;
  double mean = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) mean += fit.log_value[i] - fit.rounded_slope * fit.log_k[i];
  fit.leading_constant = std::exp(mean / ks.size());

  // Variable projection over p: coarse scan, then golden refinement.
  auto cost = [&](double p) { return project(ks, values, p).cost; };
  double best_p = 0.0, best_cost = INFINITY;
  for (int i = 1; i <= 400; ++i) {
    const double p = 0.01 * i;
    const double c = cost(p);
    if (c < best_cost) {
      best_cost = c;
      best_p = p;
    }
  }
  const double p = golden_section_minimize(cost, std::max(1e-4, best_p - 0.01), best_p + 0.01, 1e-10);
  const ProjectedFit pf = project(ks, values, p);
  fit.expansion_exponent = p;
  fit.expansion_amplitude = pf.amplitude;
  fit.expansion_offset = pf.offset;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double model = pf.amplitude * std::pow(ks[i], p) + pf.offset;
    fit.expansion_max_residual =
        std::max(fit.expansion_max_residual, std::abs(std::log(std::max(model, 1e-300)) - fit.log_value[i]));
  }
  return fit;
}

}  // namespace semipos
