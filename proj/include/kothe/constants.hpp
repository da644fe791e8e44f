#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "kothe/duality.hpp"
#include "kothe/norm.hpp"
#include "kothe/operator.hpp"
#include "kothe/search.hpp"

namespace kothe {

enum class ConstantKind { convexity, concavity };

inline const char* to_string(ConstantKind k) { return k == ConstantKind::convexity ? "convexity" : "concavity"; }

// Test tuple (x_1, ..., x_n) for the exponent r. The measure is absent for
// tuples of abstract operator inputs.
struct TupleWitness {
  std::vector<Vec> vectors;
  double r = 1.0;
  std::optional<DiscreteMeasure> measure;
};

namespace detail {

inline void check_tuple(const TupleWitness& t, std::size_t n) {
  if (t.vectors.empty()) throw InvalidArgument("tuple: empty");
  if (!(t.r > 0.0) || !std::isfinite(t.r)) throw InvalidArgument("tuple: r must be in (0, inf)");
  bool nonzero = false;
  for (const auto& v : t.vectors) {
    if (v.size() != n) throw DimensionError("tuple: vector of wrong length");
    if (!all_zero(v)) nonzero = true;
  }
  if (!nonzero) throw InvalidArgument("tuple: all vectors are zero");
}

inline const DiscreteMeasure& tuple_measure(const TupleWitness& t) {
  if (!t.measure) throw InvalidArgument("tuple: no measure attached");
  return *t.measure;
}

}  // namespace detail

// ||(sum |x_k|^r)^(1/r)||_X / (sum ||x_k||_X^r)^(1/r)
inline double convexity_ratio(const SpaceDescriptor& x, const TupleWitness& t) {
  const auto& mu = detail::tuple_measure(t);
  detail::check_tuple(t, mu.size());
  Vec norms;
  for (const auto& v : t.vectors) norms.push_back(norm(x, v, mu));
  return detail::safe_ratio(norm(x, r_sum(t.vectors, t.r), mu), r_mean(norms, t.r));
}

// (sum ||x_k||_X^r)^(1/r) / ||(sum |x_k|^r)^(1/r)||_X
inline double concavity_ratio(const SpaceDescriptor& x, const TupleWitness& t) {
  const auto& mu = detail::tuple_measure(t);
  detail::check_tuple(t, mu.size());
  Vec norms;
  for (const auto& v : t.vectors) norms.push_back(norm(x, v, mu));
  return detail::safe_ratio(r_mean(norms, t.r), norm(x, r_sum(t.vectors, t.r), mu));
}

inline double constant_ratio(const SpaceDescriptor& x, const TupleWitness& t, ConstantKind k) {
  return k == ConstantKind::convexity ? convexity_ratio(x, t) : concavity_ratio(x, t);
}

inline double constant_ratio(const OperatorSpec& op, const TupleWitness& t, ConstantKind k) {
  detail::check_tuple(t, op.in_dim());
  return k == ConstantKind::convexity ? operator_convexity_ratio(op, t.vectors, t.r)
                                      : operator_concavity_ratio(op, t.vectors, t.r);
}

struct ConstantBudget {
  std::vector<std::size_t> tuple_sizes{1, 2, 4, 8};
  SearchBudget search{};

  bool empty() const { return tuple_sizes.empty() || (search.starts == 0 && search.iterations == 0); }
};

// Best ratio found, always recomputed from the stored witness.
struct ConstantEstimate {
  double value = 1.0;
  TupleWitness witness;
  ConstantKind kind = ConstantKind::convexity;
  BoundStatus status = BoundStatus::lower_bound;
  std::optional<double> registered;  // registered exact value, if any
  std::size_t evaluations = 0;
};

namespace detail {

inline std::vector<Vec> split_tuple(std::span<const double> flat, std::size_t m, std::size_t n) {
  std::vector<Vec> out(m);
  for (std::size_t k = 0; k < m; ++k) out[k].assign(flat.begin() + k * n, flat.begin() + (k + 1) * n);
  return out;
}

// Structured starting tuples: cycled unit vectors, constant vectors and
// nested indicators.
inline std::vector<Vec> tuple_seeds(std::size_t m, std::size_t n) {
  std::vector<Vec> seeds;
  Vec unit(m * n, 0.0), flat(m * n, 1.0), nested(m * n, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    unit[k * n + (k % n)] = 1.0;
    for (std::size_t i = 0; i <= std::min(k, n - 1); ++i) nested[k * n + i] = 1.0;
  }
  seeds.push_back(std::move(unit));
  seeds.push_back(std::move(flat));
  seeds.push_back(std::move(nested));
  return seeds;
}

template <class Ratio>
ConstantEstimate run_estimate(std::size_t n, bool nonneg, double r, ConstantKind kind, const ConstantBudget& budget,
                              Ratio&& ratio) {
  ConstantEstimate est;
  est.kind = kind;
  est.witness.r = r;
  Vec e0(n, 0.0);
  e0[0] = 1.0;
  est.witness.vectors = {e0};
  est.value = ratio(std::span<const Vec>(est.witness.vectors));
  if (budget.empty()) return est;
  for (std::size_t si = 0; si < budget.tuple_sizes.size(); ++si) {
    const std::size_t m = budget.tuple_sizes[si];
    if (m == 0) continue;
    SearchBudget b = budget.search;
    b.seed = split_seed(budget.search.seed, m);
    auto f = [&](std::span<const double> flat) {
      ++est.evaluations;
      const auto tuple = split_tuple(flat, m, n);
      return ratio(std::span<const Vec>(tuple));
    };
    const auto seeds = tuple_seeds(m, n);
    const SearchResult res = maximize_ratio(m * n, nonneg, f, b, seeds);
    if (res.value > est.value) {
      est.value = res.value;
      est.witness.vectors = split_tuple(res.x, m, n);
    }
  }
  return est;
}

}  // namespace detail

// Lower bound for M^(r)(X) or M_(r)(X) on the given measure by multi-start
// search over nonnegative tuples of the budgeted sizes.
inline ConstantEstimate estimate_space_constant(const SpaceDescriptor& x, const DiscreteMeasure& mu, double r,
                                                ConstantKind kind, const ConstantBudget& budget = {}) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("estimate_space_constant: r must be in (0, inf)");
  auto ratio = [&](std::span<const Vec> vs) {
    TupleWitness t{std::vector<Vec>(vs.begin(), vs.end()), r, mu};
    bool nonzero = false;
    for (const auto& v : vs) nonzero = nonzero || !detail::all_zero(v);
    if (!nonzero) return -kInf;
    return constant_ratio(x, t, kind);
  };
  ConstantEstimate est = detail::run_estimate(mu.size(), true, r, kind, budget, ratio);
  est.witness.measure = mu;
  est.value = constant_ratio(x, est.witness, kind);
  est.registered = kind == ConstantKind::convexity ? registered_convexity(x, r, mu) : registered_concavity(x, r, mu);
  if (est.registered && std::fabs(est.value - *est.registered) <= 1e-6 * *est.registered)
    est.status = BoundStatus::exact;
  return est;
}

// Lower bound for M^(r)(T) or M_(r)(T) by search over signed input tuples.
inline ConstantEstimate estimate_operator_constant(const OperatorSpec& op, double r, ConstantKind kind,
                                                   const ConstantBudget& budget = {}) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("estimate_operator_constant: r must be in (0, inf)");
  auto ratio = [&](std::span<const Vec> vs) {
    bool nonzero = false;
    for (const auto& v : vs) nonzero = nonzero || !detail::all_zero(v);
    if (!nonzero) return -kInf;
    const double v = kind == ConstantKind::convexity ? operator_convexity_ratio(op, vs, r)
                                                     : operator_concavity_ratio(op, vs, r);
    return std::isnan(v) ? -kInf : v;
  };
  ConstantEstimate est = detail::run_estimate(op.in_dim(), false, r, kind, budget, ratio);
  est.value = constant_ratio(op, est.witness, kind);
  return est;
}

// x_k -> |x_k|^t: a tuple for (X, r) becomes one for (X^t, r/t) with every
// ratio raised to the power t.
inline TupleWitness lemma2_transport(const TupleWitness& t, double exponent) {
  if (!(exponent > 0.0) || !std::isfinite(exponent)) throw InvalidArgument("transport: t must be in (0, inf)");
  TupleWitness out{{}, t.r / exponent, t.measure};
  for (const auto& v : t.vectors) {
    Vec w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = v[i] == 0.0 ? 0.0 : std::pow(std::fabs(v[i]), exponent);
    out.vectors.push_back(std::move(w));
  }
  return out;
}

}  // namespace kothe
