#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace kothe {

// SplitMix64 finalizer. Used to derive independent per-start seeds from one
// user seed so that multi-start searches are reproducible regardless of how
// the starts are scheduled.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix_seed(seed ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

using Rng = std::mt19937_64;

// Uniform in [0, 1). Implemented by hand because the distribution objects of
// the standard library are not guaranteed to be identical across vendors.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

// Standard normal via Box-Muller; deterministic given the engine state.
inline double normal01(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

inline std::vector<double> random_nonnegative(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& e : v) {
    // Mix in exact zeros and wide dynamic range; sparse vectors are where the
    // lattice inequalities are usually tight.
    const double c = uniform01(rng);
    e = c < 0.15 ? 0.0 : std::exp(uniform(rng, -3.0, 2.0));
  }
  return v;
}

inline std::vector<double> random_signed(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& e : v) e = normal01(rng);
  return v;
}

}  // namespace kothe
