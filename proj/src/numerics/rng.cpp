#include "semipos/numerics/rng.hpp"

#include <cmath>
#include <numbers>

namespace semipos {

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 g(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
  g.next();
  return g.next();
}

std::vector<std::complex<double>> sample_complex_gaussians(std::uint64_t seed, std::size_t count) {
  SplitMix64 g(seed);
  std::vector<std::complex<double>> out(count);
  for (auto& c : out) {
    const double u1 = g.uniform();
    const double u2 = g.uniform();
    const double rho = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    c = std::complex<double>(rho * std::cos(angle), rho * std::sin(angle)) / std::numbers::sqrt2;
  }
  return out;
}

}  // namespace semipos
