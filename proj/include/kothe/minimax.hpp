#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kothe/certificates.hpp"
#include "kothe/duality.hpp"
#include "kothe/lp.hpp"
#include "kothe/operator.hpp"
#include "kothe/search.hpp"

namespace kothe {

// One side of a homogeneous form: a homogeneous map of R^dim into the
// nonnegative cone of X(mu), with exponent r and convexity constant M^(r)(X).
struct FormSide {
  std::size_t dim = 1;
  VecMap rep;
  SpaceDescriptor space = SpaceDescriptor::lp(1.0);
  DiscreteMeasure measure = DiscreteMeasure::counting(1);
  double r = 1.0;
  double convexity = 1.0;
  double degree = 1.0;  // rep(a x) = a^degree rep(x), and u scales alike

  Vec lattice(std::span<const double> x) const {
    Vec v = rep(x);
    if (v.size() != measure.size()) throw DimensionError("FormSide: representation returned wrong length");
    for (auto& e : v) e = std::fabs(e);
    return v;
  }
};

// u(x, y) on U1 x U2 with 1/t = 1/r1 + 1/r2.
struct FormSpec {
  std::function<double(std::span<const double>, std::span<const double>)> u;
  FormSide first;
  FormSide second;

  double t() const { return 1.0 / (1.0 / first.r + 1.0 / second.r); }

  void check() const {
    if (!u) throw InvalidArgument("FormSpec: empty form");
    for (const FormSide* s : {&first, &second}) {
      if (!s->rep) throw InvalidArgument("FormSpec: empty representation");
      if (!(s->r > 0.0) || !std::isfinite(s->r)) throw InvalidArgument("FormSpec: exponents must be in (0, inf)");
    }
    Rng rng(0xF0F0);
    for (int k = 0; k < 6; ++k) {
      const Vec x = random_signed(rng, first.dim), y = random_signed(rng, second.dim);
      const double a = k % 2 == 0 ? 0.5 : 3.0, b = k % 3 == 0 ? 2.0 : 0.25;
      Vec ax = x, by = y;
      for (auto& v : ax) v *= a;
      for (auto& v : by) v *= b;
      const double fa = std::pow(a, first.degree), fb = std::pow(b, second.degree);
      const double base = u(x, y), scaled = u(ax, by);
      if (std::fabs(scaled - fa * fb * base) > 1e-9 * (1.0 + std::fabs(fa * fb * base)))
        throw InvalidArgument("FormSpec: form is not bi-homogeneous");
      const Vec p = first.lattice(x), q = first.lattice(ax);
      for (std::size_t i = 0; i < p.size(); ++i)
        if (std::fabs(q[i] - fa * p[i]) > 1e-9 * (1.0 + fa * p[i]))
          throw InvalidArgument("FormSpec: first representation is not homogeneous");
      const Vec p2 = second.lattice(y), q2 = second.lattice(by);
      for (std::size_t i = 0; i < p2.size(); ++i)
        if (std::fabs(q2[i] - fb * p2[i]) > 1e-9 * (1.0 + fb * p2[i]))
          throw InvalidArgument("FormSpec: second representation is not homogeneous");
    }
  }
};

struct MinimaxConfig {
  double tolerance = 1e-6;
  std::size_t max_iterations = 500;
  std::uint64_t seed = 0;
  SearchBudget search{8, 200, 0};
};

namespace detail {

inline Vec pow_abs(const Vec& v, double r) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] == 0.0 ? 0.0 : std::pow(std::fabs(v[i]), r);
  return out;
}

inline double pairing(const Vec& a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Outer approximation of the dual ball {psi >= 0 : <psi, |z|> <= ||z||_{X^r}}.
struct DualBallCuts {
  SpaceDescriptor power;
  DiscreteMeasure measure;
  std::vector<Vec> z;
  Vec rhs;

  DualBallCuts(const FormSide& s) : power(power_space(s.space, s.r)), measure(s.measure) {
    for (std::size_t i = 0; i < measure.size(); ++i) {
      Vec e(measure.size(), 0.0);
      e[i] = 1.0;
      add(std::move(e));
    }
  }
  void add(Vec w) {
    const double m = max_abs(w);
    for (auto& v : w) v = std::fabs(v) / m;
    rhs.push_back(norm(power, w, measure));
    z.push_back(std::move(w));
  }
  // sup_z <psi, |z|> / ||z||, with the maximizing z.
  DualNormResult membership(const Vec& psi, const SearchBudget& b) const {
    Vec density(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) density[i] = psi[i] / measure[i];
    return koethe_dual_norm(power, density, measure, b);
  }
};

}  // namespace detail

// Positive functionals phi1, phi2 in the dual balls of X1^r1, X2^r2 with
//   |u(x, y)| <= M1 M2 phi1(|phi1 x|^r1)^(1/r1) phi2(|phi2 y|^r2)^(1/r2),
// found by cutting planes: an LP over both functionals constrained by the
// linearized pair inequalities and by dual-ball cuts, alternated with
// searches for violated pairs and violated ball memberships.
inline MinimaxCertificate solve_minimax(const FormSpec& form, const MinimaxConfig& cfg = {}) {
  form.check();
  const FormSide& s1 = form.first;
  const FormSide& s2 = form.second;
  const double t = form.t();
  const std::size_t m1 = s1.measure.size(), m2 = s2.measure.size();
  const double k1 = std::pow(s1.convexity, s1.r), k2 = std::pow(s2.convexity, s2.r);
  const double bound = s1.convexity * s2.convexity;

  detail::DualBallCuts ball1(s1), ball2(s2);
  struct Cut {
    Vec c1, c2;  // coefficients of phi1, phi2
    double rhs;
  };
  std::vector<Cut> cuts;
  std::vector<Vec> pair_seeds;

  MinimaxCertificate cert;
  cert.seed = cfg.seed;
  Vec psi1(m1, 0.0), psi2(m2, 0.0);

  auto add_pair_cut = [&](Vec x, Vec y) {
    Vec a = form.first.lattice(x), b = form.second.lattice(y);
    double a1 = std::pow(detail::pairing(psi1, detail::pow_abs(a, s1.r)), 1.0 / s1.r);
    double a2 = std::pow(detail::pairing(psi2, detail::pow_abs(b, s2.r)), 1.0 / s2.r);
    if (!(a1 > 0.0)) a1 = norm(s1.space, a, s1.measure);
    if (!(a2 > 0.0)) a2 = norm(s2.space, b, s2.measure);
    if (!(a1 > 0.0) || !(a2 > 0.0)) return false;
    const double sx = std::pow(s1.convexity * a1, -1.0 / s1.degree);
    const double sy = std::pow(s2.convexity * a2, -1.0 / s2.degree);
    for (auto& v : x) v *= sx;
    for (auto& v : y) v *= sy;
    a = form.first.lattice(x);
    b = form.second.lattice(y);
    Cut c{detail::pow_abs(a, s1.r), detail::pow_abs(b, s2.r), std::pow(std::fabs(form.u(x, y)), t)};
    for (auto& v : c.c1) v *= t / s1.r * k1;
    for (auto& v : c.c2) v *= t / s2.r * k2;
    cuts.push_back(std::move(c));
    Vec joined = x;
    joined.insert(joined.end(), y.begin(), y.end());
    pair_seeds.push_back(std::move(joined));
    return true;
  };

  auto solve_lp = [&]() {
    lp::LinearProgram prog(m1 + m2);
    prog.maximize = true;
    for (auto& v : prog.objective) v = 1.0;
    for (std::size_t l = 0; l < ball1.z.size(); ++l) {
      Vec row(m1 + m2, 0.0);
      std::copy(ball1.z[l].begin(), ball1.z[l].end(), row.begin());
      prog.add_row(std::move(row), lp::Sense::le, ball1.rhs[l]);
    }
    for (std::size_t l = 0; l < ball2.z.size(); ++l) {
      Vec row(m1 + m2, 0.0);
      std::copy(ball2.z[l].begin(), ball2.z[l].end(), row.begin() + static_cast<std::ptrdiff_t>(m1));
      prog.add_row(std::move(row), lp::Sense::le, ball2.rhs[l]);
    }
    for (const auto& c : cuts) {
      Vec row(c.c1);
      row.insert(row.end(), c.c2.begin(), c.c2.end());
      prog.add_row(std::move(row), lp::Sense::ge, c.rhs);
    }
    const auto sol = lp::solve(prog);
    if (sol.status != lp::Status::optimal) return false;
    psi1.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(m1));
    psi2.assign(sol.x.begin() + static_cast<std::ptrdiff_t>(m1), sol.x.end());
    return true;
  };

  // |u(x, y)| / (M1 M2 a1(x) a2(y)) over joined (x, y).
  auto violation = [&](std::span<const double> z) {
    const auto x = z.first(s1.dim), y = z.subspan(s1.dim);
    const double uv = std::fabs(form.u(x, y));
    if (uv == 0.0) return 0.0;
    const double a1 = detail::pairing(psi1, detail::pow_abs(form.first.lattice(x), s1.r));
    const double a2 = detail::pairing(psi2, detail::pow_abs(form.second.lattice(y), s2.r));
    if (a1 <= 0.0 || a2 <= 0.0) return kInf;
    return uv / (bound * std::pow(a1, 1.0 / s1.r) * std::pow(a2, 1.0 / s2.r));
  };

  const std::size_t dim = s1.dim + s2.dim;
  for (std::size_t i = 0; i < s1.dim; ++i)
    for (std::size_t j = 0; j < s2.dim; ++j) {
      Vec z(dim, 0.0);
      z[i] = 1.0;
      z[s1.dim + j] = 1.0;
      pair_seeds.push_back(std::move(z));
    }

  double worst = 0.0, margin1 = 0.0, margin2 = 0.0;
  bool lp_ok = solve_lp();
  for (cert.iterations = 0;; ++cert.iterations) {
    if (!lp_ok) {
      cert.converged = false;
      cert.status = "infeasible-lp";
      break;
    }
    SearchBudget b = cfg.search;
    b.seed = split_seed(cfg.seed, cert.iterations);
    const auto d1 = ball1.membership(psi1, b), d2 = ball2.membership(psi2, b);
    margin1 = 1.0 - d1.value;
    margin2 = 1.0 - d2.value;
    const SearchResult v = maximize_ratio(dim, false, violation, b, pair_seeds);
    worst = std::max(0.0, v.value) / 1.0 - 1.0;
    const bool ball_ok = margin1 >= -cfg.tolerance && margin2 >= -cfg.tolerance;
    const bool pair_ok = worst <= cfg.tolerance;
    if (ball_ok && pair_ok) break;
    if (cert.iterations >= cfg.max_iterations) {
      cert.converged = false;
      cert.status = "budget-exhausted";
      break;
    }
    bool added = false;
    if (margin1 < -cfg.tolerance) {
      ball1.add(d1.witness);
      added = true;
    }
    if (margin2 < -cfg.tolerance) {
      ball2.add(d2.witness);
      added = true;
    }
    if (!pair_ok) {
      const auto x = std::span<const double>(v.x).first(s1.dim);
      const auto y = std::span<const double>(v.x).subspan(s1.dim);
      added = add_pair_cut(Vec(x.begin(), x.end()), Vec(y.begin(), y.end())) || added;
    }
    if (!added) {
      cert.converged = false;
      cert.status = "stalled";
      break;
    }
    ++cert.cuts;
    lp_ok = solve_lp();
  }
  // Margins also cover every retained cut vector.
  for (std::size_t l = 0; l < ball1.z.size(); ++l)
    margin1 = std::min(margin1, (ball1.rhs[l] - detail::pairing(psi1, ball1.z[l])) / ball1.rhs[l]);
  for (std::size_t l = 0; l < ball2.z.size(); ++l)
    margin2 = std::min(margin2, (ball2.rhs[l] - detail::pairing(psi2, ball2.z[l])) / ball2.rhs[l]);
  cert.phi1 = psi1;
  cert.phi2 = psi2;
  cert.margin_k1 = margin1;
  cert.margin_k2 = margin2;
  cert.worst_violation = worst;
  return cert;
}

// |u(x,y)| / (M1 M2 phi1(..)^(1/r1) phi2(..)^(1/r2)) for a given pair.
inline double minimax_ratio(const FormSpec& form, const MinimaxCertificate& cert, std::span<const double> x,
                            std::span<const double> y) {
  const double uv = std::fabs(form.u(x, y));
  const double a1 = detail::pairing(cert.phi1, detail::pow_abs(form.first.lattice(x), form.first.r));
  const double a2 = detail::pairing(cert.phi2, detail::pow_abs(form.second.lattice(y), form.second.r));
  return detail::safe_ratio(uv, form.first.convexity * form.second.convexity * std::pow(a1, 1.0 / form.first.r) *
                                    std::pow(a2, 1.0 / form.second.r));
}

}  // namespace kothe
