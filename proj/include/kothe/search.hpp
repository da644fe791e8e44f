#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kothe/measure.hpp"
#include "kothe/rng.hpp"
#include "kothe/space.hpp"

namespace kothe {

// Budget of a multi-start local search.
struct SearchBudget {
  std::size_t starts = 24;        // random starts, in addition to supplied seed points
  std::size_t iterations = 400;   // coordinate moves per start
  std::uint64_t seed = 0;
};

struct SearchResult {
  double value = -kInf;
  Vec x;
};

using ScaleInvariantObjective = std::function<double(std::span<const double>)>;

namespace detail {

inline bool all_zero(std::span<const double> x) {
  for (double v : x)
    if (v != 0.0) return false;
  return true;
}

// Coordinate ascent with shrinking steps from a single start point. Moves are
// multiplicative (plus a jump to/from zero) on the nonnegative cone and
// additive relative to the current scale otherwise.
inline SearchResult local_ascent(Vec x, bool nonneg, const ScaleInvariantObjective& f,
                                 std::size_t iterations, Rng& rng) {
  const std::size_t n = x.size();
  SearchResult best{all_zero(x) ? -kInf : f(x), x};
  if (!std::isfinite(best.value) && best.value != kInf) best.value = -kInf;
  double step = 0.5;
  std::size_t since_improvement = 0;
  Vec trial;
  for (std::size_t it = 0; it < iterations && n > 0; ++it) {
    const std::size_t i = it % n;
    double scale = 0.0;
    for (double v : best.x) scale = std::max(scale, std::fabs(v));
    if (scale == 0.0) scale = 1.0;
    const double jitter = 1.0 + 0.25 * uniform01(rng);
    double candidates[4];
    int nc = 0;
    const double xi = best.x[i];
    if (nonneg) {
      if (xi > 0.0) {
        candidates[nc++] = xi * std::exp(step * jitter);
        candidates[nc++] = xi * std::exp(-step * jitter);
        candidates[nc++] = 0.0;
      } else {
        candidates[nc++] = step * jitter * scale;
      }
    } else {
      candidates[nc++] = xi + step * jitter * scale;
      candidates[nc++] = xi - step * jitter * scale;
      if (xi != 0.0) candidates[nc++] = 0.0;
      candidates[nc++] = -xi;
    }
    bool improved = false;
    for (int c = 0; c < nc; ++c) {
      trial = best.x;
      trial[i] = candidates[c];
      if (all_zero(trial)) continue;
      const double v = f(trial);
      if (v > best.value) {
        best.value = v;
        best.x = trial;
        improved = true;
      }
    }
    if (improved) {
      since_improvement = 0;
    } else if (++since_improvement >= n) {
      step *= 0.5;
      since_improvement = 0;
      if (step < 1e-10) break;
    }
  }
  return best;
}

}  // namespace detail

// Maximizes a positively scale-invariant objective over nonzero vectors of
// R^n (or of the nonnegative cone). Seed points are refined first, then
// budget.starts random starts; the result is a deterministic function of
// (f, seeds, budget) and never decreases when the budget grows.
inline SearchResult maximize_ratio(std::size_t n, bool nonneg, const ScaleInvariantObjective& f,
                                   const SearchBudget& budget, std::span<const Vec> seeds = {}) {
  SearchResult best;
  best.x.assign(n, 0.0);
  auto consider = [&](const SearchResult& r) {
    if (r.value > best.value) best = r;
  };
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    if (seeds[s].size() != n || detail::all_zero(seeds[s])) continue;
    Rng rng(split_seed(budget.seed, 1000003 + s));
    consider(detail::local_ascent(seeds[s], nonneg, f, budget.iterations, rng));
  }
  for (std::size_t s = 0; s < budget.starts; ++s) {
    Rng rng(split_seed(budget.seed, s));
    Vec x0 = nonneg ? random_nonnegative(rng, n) : random_signed(rng, n);
    if (detail::all_zero(x0)) x0[s % n] = 1.0;
    consider(detail::local_ascent(std::move(x0), nonneg, f, budget.iterations, rng));
  }
  return best;
}

}  // namespace kothe
