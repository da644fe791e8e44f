#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "kothe/certificates.hpp"
#include "kothe/lp.hpp"
#include "kothe/operator.hpp"
#include "kothe/search.hpp"
#include "kothe/weights.hpp"

namespace kothe {

namespace detail {

inline void check_linf_domain(const OperatorSpec& op) {
  const auto p = lp_exponent(resolve(op.domain().space()));
  if (!p || !std::isinf(*p)) throw InvalidArgument("pietsch: domain must be a subspace of l_inf^N");
}

inline double target_power(const OperatorSpec& op, std::span<const double> x, double r) {
  const double v = op.codomain().element_norm(op.apply(x));
  return v == 0.0 ? 0.0 : std::pow(v, r);
}

inline double coordinate_mean(const Vec& lambda, const Vec& coords, double r) {
  double s = 0.0;
  for (std::size_t j = 0; j < coords.size(); ++j)
    if (coords[j] != 0.0) s += lambda[j] * std::pow(std::fabs(coords[j]), r);
  return s;
}

// x scaled to sup-norm one in the coordinates.
inline Vec to_unit_cube(const OperatorSpec& op, Vec x) {
  const double m = max_abs(op.source(x));
  if (m > 0.0)
    for (auto& v : x) v /= m;
  return x;
}

// sup_x ||T x||^r / sum_j w_j |x_j|^r. When F = L_r(nu) this is a
// domination ratio, so the exact eigenvalue form applies for r = 2.
inline SearchResult pietsch_sup(const OperatorSpec& op, const Vec& w, double r, const SearchBudget& b,
                                std::span<const Vec> seeds) {
  const auto& cod = op.codomain();
  const auto p = lp_exponent(resolve(cod.space()));
  if (cod.kind() == RepresentationKind::C && op.domain().kind() == RepresentationKind::C && p && *p == r) {
    Vec w1(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) w1[j] = w[j] / op.domain().measure()[j];
    Domination d{&op, r, Vec(cod.measure().size(), 1.0), std::move(w1)};
    const SupValue s = domination_sup(d, b, seeds);
    return {s.value, s.x};
  }
  auto ratio = [&](std::span<const double> x) {
    const double t = target_power(op, x, r);
    if (t == 0.0) return 0.0;
    const double q = coordinate_mean(w, op.source(x), r);
    return q == 0.0 ? kInf : t / q;
  };
  return maximize_ratio(op.in_dim(), false, ratio, b, seeds);
}

inline std::vector<Vec> pietsch_seeds(std::size_t n) {
  std::vector<Vec> seeds = unit_vectors(n);
  for (auto& v : sign_vertices(n, 256)) seeds.push_back(std::move(v));
  return seeds;
}

}  // namespace detail

// Probability weights lambda on the coordinate functionals with
//   ||T x||^r <= pi^r sum_j lambda_j |x_j|^r,
// by column generation: an LP over the simplex maximizing the worst margin
// on a witness set, with violated x found by multi-start search on the ratio.
inline PietschCertificate solve_pietsch(const OperatorSpec& op, double r, double pi, const SolverConfig& cfg = {}) {
  if (!(r >= 1.0) || !std::isfinite(r)) throw InvalidArgument("solve_pietsch: r must be in [1, inf)");
  if (!(pi > 0.0) || !std::isfinite(pi)) throw InvalidArgument("solve_pietsch: pi must be > 0");
  detail::check_linf_domain(op);
  const std::size_t n = op.source(Vec(op.in_dim(), 0.0)).size();
  const double pr = std::pow(pi, r);

  PietschCertificate cert;
  cert.r = r;
  cert.constant = pi;
  cert.seed = cfg.seed;
  cert.lambda.assign(n, 1.0 / static_cast<double>(n));

  const std::vector<Vec> seeds = detail::pietsch_seeds(op.in_dim());
  for (const auto& s : seeds)
    if (detail::target_power(op, s, r) > 0.0) cert.witnesses.push_back(detail::to_unit_cube(op, s));

  auto scaled_lambda = [&]() {
    Vec w = cert.lambda;
    for (auto& v : w) v *= pr;
    return w;
  };
  const std::size_t rounds = 5 * cfg.max_rounds;

  for (cert.iterations = 0; cert.iterations < rounds && !cert.witnesses.empty(); ++cert.iterations) {
    // variables: lambda (n), rho+ and rho-; minimize rho
    lp::LinearProgram prog(n + 2);
    prog.objective[n] = 1.0;
    prog.objective[n + 1] = -1.0;
    Vec ones(n + 2, 0.0);
    for (std::size_t j = 0; j < n; ++j) ones[j] = 1.0;
    prog.add_row(ones, lp::Sense::eq, 1.0);
    for (const auto& x : cert.witnesses) {
      const Vec c = op.source(x);
      Vec row(n + 2, 0.0);
      for (std::size_t j = 0; j < n; ++j) row[j] = c[j] == 0.0 ? 0.0 : std::pow(std::fabs(c[j]), r);
      row[n] = 1.0;
      row[n + 1] = -1.0;
      prog.add_row(std::move(row), lp::Sense::ge, detail::target_power(op, x, r) / pr);
    }
    const auto sol = lp::solve(prog);
    if (sol.status != lp::Status::optimal) throw NumericalError("solve_pietsch: LP " + std::string(to_string(sol.status)));
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) total += std::max(0.0, sol.x[j]);
    for (std::size_t j = 0; j < n; ++j) cert.lambda[j] = std::max(0.0, sol.x[j]) / total;
    // no measure satisfies the witnesses already
    if (sol.x[n] - sol.x[n + 1] > cfg.tolerance) break;

    SearchBudget b = cfg.search;
    b.seed = split_seed(cfg.seed, 0x9E7 + cert.iterations);
    const SearchResult res = detail::pietsch_sup(op, scaled_lambda(), r, b, cert.witnesses);
    if (!(res.value > 1.0 + 1e-10)) break;
    cert.witnesses.push_back(detail::to_unit_cube(op, res.x));
  }

  // Residual over the witnesses and an independent search, on the unit cube.
  double sum = 0.0;
  for (double l : cert.lambda) sum += l;
  cert.simplex_error = std::fabs(sum - 1.0);
  auto excess = [&](const Vec& x) {
    const Vec u = detail::to_unit_cube(op, x);
    return (detail::target_power(op, u, r) - pr * detail::coordinate_mean(cert.lambda, op.source(u), r)) / pr;
  };
  SearchBudget vb = cfg.search;
  vb.seed = split_seed(cfg.seed, 0xFEED);
  std::vector<Vec> all = seeds;
  all.insert(all.end(), cert.witnesses.begin(), cert.witnesses.end());
  const SearchResult worst = detail::pietsch_sup(op, scaled_lambda(), r, vb, all);
  all.push_back(worst.x);
  cert.residual = 0.0;
  for (const auto& x : all) {
    if (detail::all_zero(x)) continue;
    const double e = excess(x);
    if (e > cert.residual) {
      cert.residual = e;
      cert.violating_x = detail::to_unit_cube(op, x);
    }
  }
  if (cert.residual > cfg.tolerance) {
    cert.feasible = false;
    cert.status = "infeasible";
  } else {
    cert.violating_x.clear();
  }
  return cert;
}

struct SummingNormEstimate {
  double lower = 0.0;  // LP value over the witnesses found
  double upper = 0.0;  // certified by the returned weights on searched x
  Vec lambda;
};

// pi_r(T) for T on a subspace of l_inf^N: min over measures lambda of
// sup ||Tx||^r / sum lambda_j |x_j|^r, a linear program over unnormalized
// weights solved by column generation.
inline SummingNormEstimate estimate_summing_norm(const OperatorSpec& op, double r, const SolverConfig& cfg = {}) {
  if (!(r >= 1.0) || !std::isfinite(r)) throw InvalidArgument("estimate_summing_norm: r must be in [1, inf)");
  detail::check_linf_domain(op);
  const std::size_t n = op.source(Vec(op.in_dim(), 0.0)).size();
  SummingNormEstimate est;
  est.lambda.assign(n, 0.0);
  std::vector<Vec> xs;
  for (const auto& s : detail::pietsch_seeds(op.in_dim()))
    if (detail::target_power(op, s, r) > 0.0) xs.push_back(detail::to_unit_cube(op, s));
  if (xs.empty()) return est;

  Vec w(n, 0.0);
  double worst = kInf;
  for (std::size_t round = 0; round < 5 * cfg.max_rounds; ++round) {
    lp::LinearProgram prog(n);
    for (auto& v : prog.objective) v = 1.0;
    for (const auto& x : xs) {
      const Vec c = op.source(x);
      Vec row(n);
      for (std::size_t j = 0; j < n; ++j) row[j] = c[j] == 0.0 ? 0.0 : std::pow(std::fabs(c[j]), r);
      prog.add_row(std::move(row), lp::Sense::ge, detail::target_power(op, x, r));
    }
    const auto sol = lp::solve(prog);
    if (sol.status != lp::Status::optimal) throw NumericalError("estimate_summing_norm: LP failed");
    w = sol.x;
    est.lower = std::pow(sol.objective, 1.0 / r);
    SearchBudget b = cfg.search;
    b.seed = split_seed(cfg.seed, 0x5A + round);
    const SearchResult res = detail::pietsch_sup(op, w, r, b, xs);
    worst = res.value;
    if (!(worst > 1.0 + 1e-10)) break;
    xs.push_back(detail::to_unit_cube(op, res.x));
  }
  double total = 0.0;
  for (double v : w) total += v;
  for (std::size_t j = 0; j < n; ++j) est.lambda[j] = w[j] / total;
  est.upper = std::pow(total * std::max(1.0, worst), 1.0 / r);
  return est;
}

}  // namespace kothe
