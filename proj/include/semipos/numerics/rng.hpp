#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace semipos {

/// SplitMix64 (Steele, Lea, Flood 2014).
///
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
///
/// Uniforms take the top 53 bits: (x >> 11 + 0.5) · 2⁻⁵³ ∈ (0, 1).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform();

 private:
  std::uint64_t state_;
};

/// Stateless mix of two words; used for per-trial seeds hash(seed, i).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

/// `count` standard complex Gaussians (g₁ + i g₂)/√2 with E|c|² = 1.
///
/// Each value consumes two uniforms u₁, u₂ from SplitMix64(seed) and applies
/// Box–Muller: ρ = √(−2 ln u₁), g₁ = ρ cos 2πu₂, g₂ = ρ sin 2πu₂.
std::vector<std::complex<double>> sample_complex_gaussians(std::uint64_t seed, std::size_t count);

}  // namespace semipos
