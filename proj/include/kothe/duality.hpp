#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "kothe/lp.hpp"
#include "kothe/norm.hpp"
#include "kothe/search.hpp"
#include "kothe/space.hpp"

namespace kothe {

enum class BoundStatus { exact, lower_bound };

inline const char* to_string(BoundStatus s) { return s == BoundStatus::exact ? "exact" : "lower-bound"; }

struct DualNormResult {
  double value = 0.0;
  BoundStatus status = BoundStatus::exact;
  Vec witness;  // x >= 0 with norm(x) = 1 (up to rounding) attaining value
};

// Rewrites a descriptor into the concrete node it is isometric to, where
// the registered identities allow it.
inline SpaceDescriptor resolve(const SpaceDescriptor& x) {
  if (auto pw = x.as<space::Power>()) {
    SpaceDescriptor s = power_space(*pw->base, pw->r);
    return s.as<space::Power>() ? s : resolve(s);
  }
  if (auto d = x.as<space::Dual>()) {
    if (auto c = closed_form_dual(*d->base)) return resolve(*c);
    return x;
  }
  if (x.as<space::Lorentz>() || x.as<space::Orlicz>()) {
    if (auto p = lp_exponent(x)) return SpaceDescriptor::lp(*p);
  }
  return x;
}

namespace detail {

// x >= 0 with ||x||_{L_p(w)} = 1 and sum w x |y| = ||y||_{L_p'(w)}, p >= 1.
inline Vec holder_extremal(std::span<const double> y, std::span<const double> w, double p) {
  const std::size_t n = y.size();
  Vec x(n, 0.0);
  if (max_abs(y) == 0.0) {
    x[0] = 1.0 / std::pow(w[0], std::isinf(p) ? 0.0 : 1.0 / p);
    return x;
  }
  if (p == 1.0) {
    std::size_t k = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::fabs(y[i]) > std::fabs(y[k])) k = i;
    x[k] = 1.0 / w[k];
    return x;
  }
  if (std::isinf(p)) {
    std::fill(x.begin(), x.end(), 1.0);
    return x;
  }
  const double e = 1.0 / (p - 1.0);
  const double m = max_abs(y);
  for (std::size_t i = 0; i < n; ++i) x[i] = y[i] == 0.0 ? 0.0 : std::pow(std::fabs(y[i]) / m, e);
  const double nx = weighted_lp(x, w, p);
  for (auto& v : x) v /= nx;
  return x;
}

inline Vec mixed_extremal(const space::MixedNorm& s, std::span<const double> y) {
  const std::size_t n1 = s.mu1.size(), n2 = s.mu2.size();
  Vec inner_norms(n1), x(n1 * n2, 0.0);
  std::vector<Vec> rows(n1);
  for (std::size_t i = 0; i < n1; ++i) {
    auto yi = y.subspan(i * n2, n2);
    inner_norms[i] = weighted_lp(yi, s.mu2.weights(), conjugate(s.p2));
    rows[i] = holder_extremal(yi, s.mu2.weights(), s.p2);
  }
  const Vec outer = holder_extremal(inner_norms, s.mu1.weights(), s.p1);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) x[i * n2 + j] = outer[i] * rows[i][j];
  return x;
}

inline Vec abs_vec(std::span<const double> x) {
  Vec a(x.begin(), x.end());
  for (auto& v : a) v = std::fabs(v);
  return a;
}

}  // namespace detail

// sup { <v, z> / norm(z) : z >= 0 } for a nonnegative functional vector v,
// by multi-start search. Always a lower bound for the true supremum.
inline SearchResult functional_sup(const SpaceDescriptor& space, std::span<const double> v,
                                   const DiscreteMeasure& mu, const SearchBudget& budget,
                                   std::span<const Vec> extra_seeds = {}) {
  const std::size_t n = mu.size();
  auto ratio = [&](std::span<const double> z) {
    const double nz = norm(space, z, mu);
    if (nz == 0.0) return -kInf;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i] * std::fabs(z[i]);
    return s / nz;
  };
  std::vector<Vec> seeds(extra_seeds.begin(), extra_seeds.end());
  for (std::size_t i = 0; i < n; ++i) {
    Vec e(n, 0.0);
    e[i] = 1.0;
    seeds.push_back(std::move(e));
  }
  seeds.emplace_back(n, 1.0);
  if (detail::max_abs(v) > 0.0) {
    for (double a : {0.5, 1.0, 2.0}) {
      Vec z(n);
      for (std::size_t i = 0; i < n; ++i) z[i] = v[i] == 0.0 ? 0.0 : std::pow(v[i] / mu[i], a);
      seeds.push_back(std::move(z));
    }
  }
  return maximize_ratio(n, true, ratio, budget, seeds);
}

// Norm of |y| in the Koethe dual: exact for registered closed forms,
// otherwise a certified lower bound with its witness.
inline DualNormResult koethe_dual_norm(const SpaceDescriptor& space, std::span<const double> y,
                                       const DiscreteMeasure& mu, const SearchBudget& budget = {}) {
  if (y.size() != mu.size()) throw DimensionError("koethe_dual_norm: size mismatch");
  DualNormResult res;
  const SpaceDescriptor r = resolve(space);
  if (auto lp = r.as<space::Lp>(); lp && lp->p >= 1.0) {
    res.value = detail::weighted_lp(y, mu.weights(), conjugate(lp->p));
    res.witness = detail::holder_extremal(y, mu.weights(), lp->p);
    return res;
  }
  if (auto m = r.as<space::MixedNorm>(); m && m->p1 >= 1.0 && m->p2 >= 1.0) {
    const auto d = closed_form_dual(r);
    res.value = norm(*d, y, mu);
    res.witness = detail::mixed_extremal(*m, y);
    return res;
  }
  res.status = BoundStatus::lower_bound;
  if (detail::max_abs(y) == 0.0) {
    res.witness.assign(y.size(), 0.0);
    res.witness[0] = 1.0;
    res.witness[0] /= norm(space, res.witness, mu);
    return res;
  }
  Vec v(y.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = mu[i] * std::fabs(y[i]);
  const Vec seed = detail::abs_vec(y);
  const SearchResult best = functional_sup(space, v, mu, budget, std::span<const Vec>(&seed, 1));
  res.value = std::max(0.0, best.value);
  res.witness = best.x;
  const double nw = norm(space, res.witness, mu);
  for (auto& e : res.witness) e = std::fabs(e) / nw;
  return res;
}

inline DualNormResult koethe_dual_norm(const SpaceDescriptor& space, const LatticeFunction& y,
                                       const SearchBudget& budget = {}) {
  return koethe_dual_norm(space, y.values(), y.measure(), budget);
}

struct ConvexificationResult {
  double value = 0.0;  // upper bound: total quasi-norm of an explicit decomposition
  double lower = 0.0;  // <v, |x|> / (sup of <v, z>/norm(z) found)
  double gap = 0.0;
  bool converged = true;
  std::size_t rounds = 0;
  Vec functional;           // v >= 0
  std::vector<Vec> pieces;  // |x| <= sum of pieces, value = sum of their norms
};

struct ConvexificationOptions {
  SearchBudget search{};
  std::size_t max_rounds = 60;
  double tolerance = 1e-9;
};

// Enclosure of the largest lattice norm below the quasi-norm of the space,
// evaluated at |x|. Column generation on
//   max <v, |x|>  s.t.  <v, z> <= norm(z) for all z >= 0,  v >= 0,
// whose LP duals are decompositions of |x|.
inline ConvexificationResult convexification_norm(const SpaceDescriptor& space, std::span<const double> x,
                                                  const DiscreteMeasure& mu,
                                                  const ConvexificationOptions& opt = {}) {
  const std::size_t n = mu.size();
  if (x.size() != n) throw DimensionError("convexification_norm: size mismatch");
  ConvexificationResult res;
  const Vec a = detail::abs_vec(x);
  res.functional.assign(n, 0.0);
  if (detail::max_abs(a) == 0.0) return res;

  const double direct = norm(space, a, mu);
  if (auto t = convexity_exponent(space); t && *t >= 1.0) {
    // Already a norm: the trivial decomposition is optimal.
    res.value = res.lower = direct;
    res.pieces.push_back(a);
    const auto d = koethe_dual_norm(space, a, mu, opt.search);
    if (d.status == BoundStatus::exact) {
      for (std::size_t i = 0; i < n; ++i) res.functional[i] = mu[i] * d.witness[i];
      // rescale so that <v, a> = ||a||
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += res.functional[i] * a[i];
      if (s > 0.0)
        for (auto& e : res.functional) e *= direct / s;
    }
    return res;
  }

  std::vector<Vec> cuts;  // normalized to max entry 1
  Vec cut_norms;
  auto add_cut = [&](Vec z) {
    const double m = detail::max_abs(z);
    if (m == 0.0) return;
    for (auto& e : z) e = std::fabs(e) / m;
    const double nz = norm(space, z, mu);
    cuts.push_back(std::move(z));
    cut_norms.push_back(nz);
  };
  for (std::size_t i = 0; i < n; ++i) {
    Vec e(n, 0.0);
    e[i] = 1.0;
    add_cut(std::move(e));
  }
  add_cut(a);

  lp::Result sol;
  double worst = kInf;
  for (res.rounds = 0; res.rounds < opt.max_rounds; ++res.rounds) {
    lp::LinearProgram prog(n);
    prog.maximize = true;
    prog.objective = a;
    for (std::size_t k = 0; k < cuts.size(); ++k) prog.add_row(cuts[k], lp::Sense::le, cut_norms[k]);
    sol = lp::solve(prog);
    if (sol.status != lp::Status::optimal) throw NumericalError("convexification_norm: LP failed");
    SearchBudget b = opt.search;
    b.seed = split_seed(opt.search.seed, res.rounds);
    const SearchResult sep = functional_sup(space, sol.x, mu, b, cuts);
    worst = std::max(1.0, sep.value);
    if (sep.value <= 1.0 + opt.tolerance) break;
    add_cut(sep.x);
  }
  res.converged = worst <= 1.0 + opt.tolerance;
  res.functional = sol.x;

  double pairing = 0.0;
  for (std::size_t i = 0; i < n; ++i) pairing += sol.x[i] * a[i];
  res.lower = pairing / worst;

  // Decomposition from the duals, stretched to cover |x| if rounding left a
  // shortfall.
  Vec cover(n, 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    const double c = std::max(0.0, sol.duals[k]);
    if (c == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) cover[i] += c * cuts[k][i];
    total += c * cut_norms[k];
  }
  double stretch = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == 0.0) continue;
    stretch = cover[i] > 0.0 ? std::max(stretch, a[i] / cover[i]) : kInf;
  }
  if (std::isfinite(stretch) && stretch * total < direct) {
    res.value = stretch * total;
    for (std::size_t k = 0; k < cuts.size(); ++k) {
      const double c = std::max(0.0, sol.duals[k]);
      if (c == 0.0) continue;
      Vec piece = cuts[k];
      for (auto& e : piece) e *= stretch * c;
      res.pieces.push_back(std::move(piece));
    }
  } else {
    res.value = direct;
    res.pieces.push_back(a);
  }
  res.lower = std::min(res.lower, res.value);
  res.gap = res.value - res.lower;
  return res;
}

inline ConvexificationResult convexification_norm(const SpaceDescriptor& space, const LatticeFunction& x,
                                                  const ConvexificationOptions& opt = {}) {
  return convexification_norm(space, x.values(), x.measure(), opt);
}

}  // namespace kothe
