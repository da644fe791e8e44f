#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "kothe/error.hpp"
#include "kothe/measure.hpp"
#include "kothe/space.hpp"

namespace kothe {

// Relative tolerance of the Luxemburg bisection. Every result computed from an
// Orlicz norm inherits it.
inline constexpr double kOrliczRelTol = 1e-10;

namespace detail {

inline double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::fabs(v));
  return m;
}

// (sum w_i |x_i|^p)^(1/p) with the largest entry factored out so that scaling
// x by a power of two scales the result exactly.
inline double weighted_lp(std::span<const double> x, std::span<const double> w, double p) {
  const double m = max_abs(x);
  if (m == 0.0) return 0.0;
  if (std::isinf(p)) return m;
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) continue;
    s += w[i] * std::pow(std::fabs(x[i]) / m, p);
  }
  return m * std::pow(s, 1.0 / p);
}

inline double mixed_norm(const space::MixedNorm& s, std::span<const double> x) {
  const std::size_t n1 = s.mu1.size(), n2 = s.mu2.size();
  Vec rows(n1);
  for (std::size_t i = 0; i < n1; ++i) rows[i] = weighted_lp(x.subspan(i * n2, n2), s.mu2.weights(), s.p2);
  return weighted_lp(rows, s.mu1.weights(), s.p1);
}

inline double lorentz_norm(const space::Lorentz& s, std::span<const double> x,
                           std::span<const double> w) {
  const StepFunction f = decreasing_rearrangement(x, w);
  const double m = f.levels.empty() ? 0.0 : f.levels.front();
  if (m == 0.0) return 0.0;
  if (std::isinf(s.q)) {
    double best = 0.0;
    for (std::size_t k = 0; k < f.levels.size(); ++k)
      best = std::max(best, (f.levels[k] / m) * std::pow(f.breakpoints[k + 1], 1.0 / s.p));
    return m * best;
  }
  // int_0^inf (t^(1/p) f*(t))^q dt/t over a step function.
  const double e = s.q / s.p;
  double acc = 0.0;
  for (std::size_t k = 0; k < f.levels.size(); ++k) {
    if (f.levels[k] == 0.0) continue;
    const double dk = std::pow(f.breakpoints[k + 1], e) - std::pow(f.breakpoints[k], e);
    acc += std::pow(f.levels[k] / m, s.q) * dk;
  }
  return m * std::pow(acc / e, 1.0 / s.q);
}

inline double luxemburg_norm(const space::Orlicz& s, std::span<const double> x,
                             std::span<const double> w) {
  const double m = max_abs(x);
  if (m == 0.0) return 0.0;
  auto modular = [&](double lambda) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0) continue;
      const double arg = std::fabs(x[i]) / lambda;
      acc += w[i] * s.phi(s.root == 1.0 ? arg : std::pow(arg, s.root));
    }
    return acc;
  };
  // Bracket [lo, hi] with modular(lo) > 1 >= modular(hi) by doubling/halving,
  // starting from the sup norm.
  double lo = m, hi = m;
  constexpr int kMaxBracket = 2100;
  if (modular(m) > 1.0) {
    int it = 0;
    while (modular(hi) > 1.0) {
      lo = hi;
      hi *= 2.0;
      if (++it > kMaxBracket || std::isinf(hi))
        throw NumericalError("Orlicz norm: modular never drops to 1 (Young function does not vanish at 0?)");
    }
  } else {
    int it = 0;
    while (modular(lo) <= 1.0) {
      hi = lo;
      lo *= 0.5;
      if (++it > kMaxBracket || !std::isfinite(m / lo))
        throw NumericalError("Orlicz norm: modular never exceeds 1 (Young function bounded?)");
    }
  }
  while (hi - lo > kOrliczRelTol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (modular(mid) > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

}  // namespace detail

// Quasi-norm of x (values on the atoms of mu) in the given space.
inline double norm(const SpaceDescriptor& space, std::span<const double> x, const DiscreteMeasure& mu) {
  if (x.size() != mu.size())
    throw DimensionError("norm: " + std::to_string(x.size()) + " values for " + std::to_string(mu.size()) +
                         " atoms");
  const auto w = mu.weights();
  if (auto lp = space.as<space::Lp>()) return detail::weighted_lp(x, w, lp->p);
  if (auto m = space.as<space::MixedNorm>()) {
    if (m->mu1.size() * m->mu2.size() != x.size())
      throw DimensionError("norm: mixed norm grid " + std::to_string(m->mu1.size()) + "x" +
                           std::to_string(m->mu2.size()) + " does not match " + std::to_string(x.size()) +
                           " atoms");
    for (std::size_t i = 0; i < m->mu1.size(); ++i)
      for (std::size_t j = 0; j < m->mu2.size(); ++j) {
        const double pw = m->mu1[i] * m->mu2[j];
        if (std::fabs(pw - w[i * m->mu2.size() + j]) > 1e-12 * pw)
          throw InvalidArgument("norm: measure is not the product measure of the mixed-norm grid");
      }
    return detail::mixed_norm(*m, x);
  }
  if (auto l = space.as<space::Lorentz>()) return detail::lorentz_norm(*l, x, w);
  if (auto o = space.as<space::Orlicz>()) return detail::luxemburg_norm(*o, x, w);
  if (auto pw = space.as<space::Power>()) {
    Vec root(x.size());
    const double inv = 1.0 / pw->r;
    for (std::size_t i = 0; i < x.size(); ++i) root[i] = x[i] == 0.0 ? 0.0 : std::pow(std::fabs(x[i]), inv);
    const double n = norm(*pw->base, root, mu);
    return n == 0.0 ? 0.0 : std::pow(n, pw->r);
  }
  if (auto d = space.as<space::Dual>()) {
    if (auto resolved = closed_form_dual(*d->base)) return norm(*resolved, x, mu);
    throw InvalidArgument("norm: no closed-form dual registered for " + d->base->name() +
                          "; use koethe_dual_norm");
  }
  throw InvalidArgument("norm: unknown space");
}

inline double norm(const SpaceDescriptor& space, const LatticeFunction& x) {
  return norm(space, x.values(), x.measure());
}

}  // namespace kothe
