#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kothe/certificates.hpp"
#include "kothe/constants.hpp"
#include "kothe/duality.hpp"
#include "kothe/lp.hpp"
#include "kothe/minimax.hpp"
#include "kothe/operator.hpp"
#include "kothe/search.hpp"

namespace kothe {

struct NormValue {
  double value = 0.0;
  bool exact = true;
  Vec argmax;  // maximizer, when searched
};

// sup_{||y||_{L_r(nu)} <= 1} ||omega^(1/r) y||_Y. Closed form for Y = L_p,
// multi-start lower bound otherwise.
inline NormValue multiplication_norm(const SpaceDescriptor& y, const DiscreteMeasure& nu,
                                     std::span<const double> omega, double r, const SearchBudget& budget = {},
                                     std::span<const Vec> seeds = {}) {
  const std::size_t n = nu.size();
  if (omega.size() != n) throw DimensionError("multiplication_norm: size mismatch");
  Vec g(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (omega[i] < 0.0 || std::isnan(omega[i])) throw InvalidArgument("multiplication_norm: negative weight");
    g[i] = omega[i] == 0.0 ? 0.0 : std::pow(omega[i], 1.0 / r);
  }
  if (detail::max_abs(g) == 0.0) return {0.0, true, {}};
  if (auto p = lp_exponent(resolve(y))) {
    if (*p < r) return {detail::weighted_lp(g, nu.weights(), *p * r / (r - *p)), true, {}};
    const double e = (std::isinf(*p) ? 0.0 : 1.0 / *p) - 1.0 / r;
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, g[i] * std::pow(nu[i], e));
    return {m, true, {}};
  }
  auto ratio = [&](std::span<const double> z) {
    Vec gz(n);
    for (std::size_t i = 0; i < n; ++i) gz[i] = g[i] * std::fabs(z[i]);
    const double den = detail::weighted_lp(z, nu.weights(), r);
    return den == 0.0 ? -kInf : norm(y, gz, nu) / den;
  };
  std::vector<Vec> all(seeds.begin(), seeds.end());
  Vec ones(n, 1.0);
  all.push_back(ones);
  for (std::size_t i = 0; i < n; ++i) {
    Vec e(n, 0.0);
    e[i] = 1.0;
    all.push_back(std::move(e));
  }
  for (double a : {0.5, 1.0, 2.0}) {
    Vec z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = g[i] == 0.0 ? 0.0 : std::pow(g[i], a);
    all.push_back(std::move(z));
  }
  const SearchResult res = maximize_ratio(n, true, ratio, budget, all);
  return {res.value, false, res.x};
}

// sup_{||x||_X <= 1} (sum mu w |x|^r)^(1/r): the norm of the weight w in the
// Koethe dual of X^r, to the power 1/r.
inline NormValue domain_weight_bound(const SpaceDescriptor& x, const DiscreteMeasure& mu, std::span<const double> w,
                                     double r, const SearchBudget& budget = {}) {
  const auto d = koethe_dual_norm(power_space(x, r), w, mu, budget);
  return {d.value == 0.0 ? 0.0 : std::pow(d.value, 1.0 / r), d.status == BoundStatus::exact, d.witness};
}

// The weighted domination  sum nu u |psi T x|^r  <=  R(x)  with u = 1/omega2
// and R(x) = sum mu w1 |phi x|^r (or ||phi x||_X^r without w1).
struct Domination {
  const OperatorSpec* op = nullptr;
  double r = 1.0;
  Vec u;
  std::optional<Vec> w1;

  double lhs(std::span<const double> x) const {
    const Vec img = op->image(x);
    const auto& nu = op->codomain().measure();
    double s = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) {
      const double a = std::fabs(img[i]);
      if (a == 0.0) continue;
      if (std::isinf(u[i])) return kInf;
      s += nu[i] * u[i] * std::pow(a, r);
    }
    return s;
  }

  double rhs(std::span<const double> x) const {
    if (!w1) {
      const double c = op->domain().element_norm(x);
      return c == 0.0 ? 0.0 : std::pow(c, r);
    }
    const Vec src = op->source(x);
    const auto& mu = op->domain().measure();
    double s = 0.0;
    for (std::size_t j = 0; j < src.size(); ++j)
      if (src[j] != 0.0) s += mu[j] * (*w1)[j] * std::pow(std::fabs(src[j]), r);
    return s;
  }

  double ratio(std::span<const double> x) const {
    const double l = lhs(x);
    if (l == 0.0) return 0.0;
    const double q = rhs(x);
    return q == 0.0 ? kInf : l / q;
  }
};

struct SupValue {
  double value = 0.0;
  Vec x;
  bool exact = false;
};

namespace detail {

// Per-coordinate weights d with R(x) = sum d_j x_j^2, if R is a diagonal
// quadratic form (r = 2 only).
inline std::optional<Vec> domination_quadratic_rhs(const Domination& d) {
  const auto& dom = d.op->domain();
  if (!d.w1) return dom.quadratic_form();
  const auto& mu = dom.measure();
  switch (dom.kind()) {
    case RepresentationKind::C: {
      Vec q(mu.size());
      for (std::size_t j = 0; j < q.size(); ++j) q[j] = mu[j] * (*d.w1)[j];
      return q;
    }
    case RepresentationKind::D:
    case RepresentationKind::E: {
      if (!dom.inner()->p || *dom.inner()->p != 2.0) return std::nullopt;
      Vec q(dom.input_dim());
      for (std::size_t j = 0; j < q.size(); ++j) q[j] = mu[j / dom.block_dim()] * (*d.w1)[j / dom.block_dim()];
      return q;
    }
    default:
      return std::nullopt;
  }
}

// Codomain weight per output coordinate, if |psi(v)|^2 is a diagonal
// quadratic form in v.
inline std::optional<Vec> domination_quadratic_lhs(const Domination& d) {
  const auto& cod = d.op->codomain();
  const auto& nu = cod.measure();
  switch (cod.kind()) {
    case RepresentationKind::C: {
      Vec q(nu.size());
      for (std::size_t i = 0; i < q.size(); ++i) q[i] = nu[i] * d.u[i];
      return q;
    }
    case RepresentationKind::D:
    case RepresentationKind::E: {
      if (!cod.inner()->p || *cod.inner()->p != 2.0) return std::nullopt;
      Vec q(cod.input_dim());
      for (std::size_t j = 0; j < q.size(); ++j) q[j] = nu[j / cod.block_dim()] * d.u[j / cod.block_dim()];
      return q;
    }
    default:
      return std::nullopt;
  }
}

}  // namespace detail

// Exact sup_x lhs/rhs as a generalized largest eigenvalue, available for
// r = 2, matrix operators and diagonal quadratic forms on both sides.
inline std::optional<SupValue> exact_domination_sup(const Domination& d) {
  if (d.r != 2.0 || !d.op->matrix()) return std::nullopt;
  const auto rq = detail::domination_quadratic_rhs(d);
  const auto lq = detail::domination_quadratic_lhs(d);
  if (!rq || !lq) return std::nullopt;
  const Eigen::MatrixXd& t = *d.op->matrix();
  const auto n = t.cols();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    const double w = (*lq)[static_cast<std::size_t>(i)];
    if (t.row(i).cwiseAbs().maxCoeff() == 0.0) continue;
    if (std::isinf(w)) {
      Eigen::Index j;
      t.row(i).cwiseAbs().maxCoeff(&j);
      SupValue s{kInf, Vec(static_cast<std::size_t>(n), 0.0), true};
      s.x[static_cast<std::size_t>(j)] = 1.0;
      return s;
    }
    m += w * t.row(i).transpose() * t.row(i);
  }
  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < n; ++j) {
    if ((*rq)[static_cast<std::size_t>(j)] > 0.0) {
      active.push_back(j);
    } else if (m(j, j) > 0.0) {
      SupValue s{kInf, Vec(static_cast<std::size_t>(n), 0.0), true};
      s.x[static_cast<std::size_t>(j)] = 1.0;
      return s;
    }
  }
  SupValue s{0.0, Vec(static_cast<std::size_t>(n), 0.0), true};
  if (active.empty()) return s;
  const auto k = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd a(k, k);
  for (Eigen::Index p = 0; p < k; ++p)
    for (Eigen::Index q = 0; q < k; ++q)
      a(p, q) = m(active[p], active[q]) / std::sqrt((*rq)[active[p]] * (*rq)[active[q]]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  const Eigen::Index top = k - 1;
  s.value = std::max(0.0, eig.eigenvalues()[top]);
  for (Eigen::Index p = 0; p < k; ++p)
    s.x[static_cast<std::size_t>(active[p])] = eig.eigenvectors()(p, top) / std::sqrt((*rq)[active[p]]);
  return s;
}

namespace detail {

// Half of the sign vertices of the cube (x and -x give the same ratios).
inline std::vector<Vec> sign_vertices(std::size_t n, std::size_t cap = 512) {
  std::vector<Vec> out;
  if (n == 0 || n > 12) return out;
  const std::size_t count = std::size_t{1} << (n - 1);
  for (std::size_t mask = 0; mask < count && out.size() < cap; ++mask) {
    Vec v(n, 1.0);
    for (std::size_t j = 1; j < n; ++j)
      if (mask & (std::size_t{1} << (j - 1))) v[j] = -1.0;
    out.push_back(std::move(v));
  }
  return out;
}

inline std::vector<Vec> unit_vectors(std::size_t n) {
  std::vector<Vec> out;
  for (std::size_t j = 0; j < n; ++j) {
    Vec e(n, 0.0);
    e[j] = 1.0;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace detail

// sup_x lhs/rhs: exact where the eigenvalue form applies, else multi-start.
inline SupValue domination_sup(const Domination& d, const SearchBudget& budget, std::span<const Vec> seeds = {},
                               bool allow_exact = true) {
  if (allow_exact)
    if (auto s = exact_domination_sup(d)) return *s;
  std::vector<Vec> all(seeds.begin(), seeds.end());
  const std::size_t n = d.op->in_dim();
  for (auto& e : detail::unit_vectors(n)) all.push_back(std::move(e));
  for (auto& v : detail::sign_vertices(n, 64)) all.push_back(std::move(v));
  auto f = [&](std::span<const double> x) { return d.ratio(x); };
  const SearchResult res = maximize_ratio(n, false, f, budget, all);
  return {res.value, res.x, false};
}

namespace detail {

struct Witness {
  Vec x;  // normalized so that the unweighted domain side is 1
  Vec a;  // |psi T x|^r over nu
  Vec c;  // |phi x|^r over mu
};

inline std::optional<Witness> make_witness(const OperatorSpec& op, Vec x, double r) {
  const double cost = op.domain().element_norm(x);
  if (!(cost > 0.0) || !std::isfinite(cost)) return std::nullopt;
  for (auto& v : x) v /= cost;
  Witness w;
  const Vec img = op.image(x);
  w.a.resize(img.size());
  bool nonzero = false;
  for (std::size_t i = 0; i < img.size(); ++i) {
    w.a[i] = img[i] == 0.0 ? 0.0 : std::pow(std::fabs(img[i]), r);
    nonzero = nonzero || w.a[i] > 0.0;
  }
  if (!nonzero) return std::nullopt;
  const Vec src = op.source(x);
  w.c.resize(src.size());
  for (std::size_t j = 0; j < src.size(); ++j) w.c[j] = src[j] == 0.0 ? 0.0 : std::pow(std::fabs(src[j]), r);
  w.x = std::move(x);
  return w;
}

// Support function of the dual ball of X^r (the convexification of X^r)
// with a linearization along given directions.
class Envelope {
 public:
  Envelope(SpaceDescriptor xr, DiscreteMeasure mu) : xr_(std::move(xr)), mu_(std::move(mu)) {
    auto t = convexity_exponent(xr_);
    normed_ = t && *t >= 1.0;
    closed_ = koethe_dual_closed();
    for (std::size_t j = 0; j < mu_.size(); ++j) {
      Vec e(mu_.size(), 0.0);
      e[j] = 1.0;
      add_cut(std::move(e));
    }
  }

  bool exact() const { return normed_; }

  void add_cut(Vec w) {
    const double m = max_abs(w);
    if (m == 0.0) return;
    for (auto& v : w) v = std::fabs(v) / m;
    cut_norms_.push_back(norm(xr_, w, mu_));
    cuts_.push_back(std::move(w));
  }
  const std::vector<Vec>& cuts() const { return cuts_; }
  const Vec& cut_norms() const { return cut_norms_; }

  // Value at z and derivatives along each direction.
  double evaluate(const Vec& z, const std::vector<Vec>& dirs, Vec& deriv) const {
    deriv.assign(dirs.size(), 0.0);
    if (normed_) {
      const double base = norm(xr_, z, mu_);
      if (closed_) {
        // gradient = mu * Hoelder extremal of z in the dual
        const auto d = koethe_dual_norm(dual_space(xr_), z, mu_);
        Vec v(z.size());
        for (std::size_t j = 0; j < z.size(); ++j) v[j] = mu_[j] * d.witness[j];
        for (std::size_t k = 0; k < dirs.size(); ++k)
          for (std::size_t j = 0; j < z.size(); ++j) deriv[k] += v[j] * dirs[k][j];
        return base;
      }
      const double h = 1e-7;
      for (std::size_t k = 0; k < dirs.size(); ++k) {
        Vec zz = z;
        for (std::size_t j = 0; j < z.size(); ++j) zz[j] += h * base * dirs[k][j];
        deriv[k] = (norm(xr_, zz, mu_) - base) / (h * base);
      }
      return base;
    }
    lp::LinearProgram prog(z.size());
    prog.maximize = true;
    prog.objective = z;
    for (std::size_t l = 0; l < cuts_.size(); ++l) prog.add_row(cuts_[l], lp::Sense::le, cut_norms_[l]);
    const auto sol = lp::solve(prog);
    if (sol.status != lp::Status::optimal) throw NumericalError("envelope LP failed");
    for (std::size_t k = 0; k < dirs.size(); ++k)
      for (std::size_t j = 0; j < z.size(); ++j) deriv[k] += sol.x[j] * dirs[k][j];
    return sol.objective;
  }

 private:
  bool koethe_dual_closed() const {
    if (!normed_) return false;
    const auto r = resolve(xr_);
    if (auto lp = r.as<space::Lp>()) return lp->p >= 1.0 && lp->p < kInf && lp->p > 1.0;
    return false;
  }

  SpaceDescriptor xr_;
  DiscreteMeasure mu_;
  bool normed_ = false;
  bool closed_ = false;
  std::vector<Vec> cuts_;
  Vec cut_norms_;
};

struct MasterState {
  Vec theta;
  Vec b;
  double value = -kInf;
  double gap = kInf;
};

// Maximizes  (1/p) log sum nu b^(p/r) - (1/r) log E(sum theta c),
// b = sum theta a, over the simplex by exponentiated gradient ascent; p < r.
inline MasterState solve_master(const std::vector<Witness>& ws, const DiscreteMeasure& nu, double p, double r,
                                const Envelope* env, Vec theta, std::size_t iterations) {
  const std::size_t k_count = ws.size(), n = nu.size();
  if (theta.size() != k_count) theta.assign(k_count, 1.0 / static_cast<double>(k_count));
  std::vector<Vec> cdirs;
  if (env)
    for (const auto& w : ws) cdirs.push_back(w.c);

  auto eval = [&](const Vec& th, Vec* grad, Vec* bout) {
    Vec b(n, 0.0);
    for (std::size_t k = 0; k < k_count; ++k)
      for (std::size_t i = 0; i < n; ++i) b[i] += th[k] * ws[k].a[i];
    double s = 0.0;
    Vec db(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (b[i] <= 0.0) continue;
      s += nu[i] * std::pow(b[i], p / r);
      db[i] = nu[i] * std::pow(b[i], p / r - 1.0);
    }
    double value = std::log(s) / p;
    Vec deriv;
    double e = 1.0;
    if (env) {
      Vec z(ws.front().c.size(), 0.0);
      for (std::size_t k = 0; k < k_count; ++k)
        for (std::size_t j = 0; j < z.size(); ++j) z[j] += th[k] * ws[k].c[j];
      e = env->evaluate(z, cdirs, deriv);
      value -= std::log(e) / r;
    } else {
      double tot = 0.0;
      for (double t : th) tot += t;
      e = tot;
      value -= std::log(e) / r;
    }
    if (grad) {
      grad->assign(k_count, 0.0);
      for (std::size_t k = 0; k < k_count; ++k) {
        double g = 0.0;
        for (std::size_t i = 0; i < n; ++i) g += db[i] * ws[k].a[i];
        (*grad)[k] = (g / s - (env ? deriv[k] : 1.0) / e) / r;
      }
    }
    if (bout) *bout = std::move(b);
    return value;
  };

  MasterState st;
  st.theta = theta;
  Vec grad;
  st.value = eval(st.theta, &grad, &st.b);
  double eta = 2.0 * r;
  for (std::size_t it = 0; it < iterations; ++it) {
    st.gap = *std::max_element(grad.begin(), grad.end());
    if (st.gap < 1e-11) break;
    Vec next(k_count);
    double gmax = st.gap, z = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
      next[k] = st.theta[k] * std::exp(eta * (grad[k] - gmax));
      z += next[k];
    }
    for (auto& v : next) v = std::max(v / z, 1e-300);
    Vec ng, nb;
    const double nv = eval(next, &ng, &nb);
    if (nv >= st.value) {
      st.theta = std::move(next);
      st.value = nv;
      grad = std::move(ng);
      st.b = std::move(nb);
      eta = std::min(eta * 1.25, 1e6);
    } else {
      eta *= 0.5;
      if (eta < 1e-12) break;
    }
  }
  st.gap = *std::max_element(grad.begin(), grad.end());
  return st;
}

struct DomainFit {
  Vec w;              // weight over mu
  double tau = 0.0;   // sup_{||z||_{X^r} <= 1} <mu w, z>
  bool exact = true;  // tau computed by a closed-form dual
  bool feasible = true;
};

// min tau s.t. <mu w, c_k> >= h_k and <mu w, z> <= tau ||z||_{X^r}, with the
// z-cuts generated from the Koethe dual of X^r.
inline DomainFit fit_domain_weight(const std::vector<Vec>& cs, const Vec& hs, Envelope& env, const SpaceDescriptor& xr,
                                   const DiscreteMeasure& mu, const SearchBudget& budget) {
  const std::size_t n = mu.size();
  DomainFit fit;
  fit.w.assign(n, 0.0);
  bool any = false;
  for (double h : hs) any = any || h > 0.0;
  if (!any) return fit;
  for (std::size_t round = 0; round < 100; ++round) {
    lp::LinearProgram prog(n + 1);
    prog.objective[n] = 1.0;
    for (std::size_t k = 0; k < cs.size(); ++k) {
      Vec row(n + 1, 0.0);
      for (std::size_t j = 0; j < n; ++j) row[j] = mu[j] * cs[k][j];
      prog.add_row(std::move(row), lp::Sense::ge, hs[k]);
    }
    for (std::size_t l = 0; l < env.cuts().size(); ++l) {
      Vec row(n + 1, 0.0);
      for (std::size_t j = 0; j < n; ++j) row[j] = mu[j] * env.cuts()[l][j];
      row[n] = -env.cut_norms()[l];
      prog.add_row(std::move(row), lp::Sense::le, 0.0);
    }
    const auto sol = lp::solve(prog);
    if (sol.status == lp::Status::infeasible) {
      fit.feasible = false;
      return fit;
    }
    if (sol.status != lp::Status::optimal) throw NumericalError("fit_domain_weight: LP " + std::string(to_string(sol.status)));
    fit.w.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(n));
    const double tau = sol.x[n];
    SearchBudget b = budget;
    b.seed = split_seed(budget.seed, 7000 + round);
    const auto d = koethe_dual_norm(xr, fit.w, mu, b);
    fit.exact = d.status == BoundStatus::exact;
    fit.tau = std::max(tau, d.value);
    if (d.value <= tau * (1.0 + 1e-10) + 1e-300) break;
    env.add_cut(d.witness);
  }
  return fit;
}

}  // namespace detail

namespace detail {

inline double resolved_codomain_exponent(const SpaceDescriptor& y, bool& closed) {
  if (auto p = lp_exponent(resolve(y))) {
    closed = true;
    return *p;
  }
  closed = false;
  const auto r = resolve(y);
  if (auto l = r.as<space::Lorentz>()) return l->p;
  if (auto m = r.as<space::MixedNorm>()) return std::min(m->p1, m->p2);
  if (auto o = r.as<space::Orlicz>()) return o->phi.kind() == YoungFunction::Kind::custom ? 1.0 : o->phi.p() * o->root;
  return 1.0;
}

inline ConstantUse resolve_concavity(const Representation& cod, double r, const SolverConfig& cfg) {
  if (cfg.codomain_concavity) return {*cfg.codomain_concavity, false};
  if (auto c = registered_concavity(cod.space(), r, cod.measure())) return {*c, true};
  ConstantBudget b = cfg.constants;
  b.search.seed = split_seed(cfg.seed, 0xC0C0);
  return {estimate_space_constant(cod.space(), cod.measure(), r, ConstantKind::concavity, b).value, false};
}

inline ConstantUse resolve_convexity(const Representation& dom, double r, const SolverConfig& cfg) {
  if (dom.kind() == RepresentationKind::B) return {1.0, true};
  if (cfg.domain_convexity) return {*cfg.domain_convexity, false};
  if (auto c = registered_convexity(dom.space(), r, dom.measure())) return {*c, true};
  ConstantBudget b = cfg.constants;
  b.search.seed = split_seed(cfg.seed, 0xC0C1);
  return {estimate_space_constant(dom.space(), dom.measure(), r, ConstantKind::convexity, b).value, false};
}

// Mode of the weight problem: Dirac (no omega1), fixed omega1 = 1 for
// domains that are L_r, or a fitted pair.
enum class PairMode { dirac, fixed_lr, fitted };

inline PairMode pair_mode(const Representation& dom, double r) {
  if (dom.kind() == RepresentationKind::B) return PairMode::dirac;
  auto p = lp_exponent(resolve(dom.space()));
  if (p && *p == r && dom.kind() != RepresentationKind::A) return PairMode::fixed_lr;
  return PairMode::fitted;
}

inline Vec u_from_b(const Vec& b, double p, double r) {
  Vec u(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) u[i] = b[i] > 0.0 ? std::pow(b[i], p / r - 1.0) : kInf;
  return u;
}

inline Vec omega_from_u(const Vec& u) {
  Vec w(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) w[i] = std::isinf(u[i]) ? 0.0 : 1.0 / u[i];
  return w;
}

}  // namespace detail

namespace detail {

inline std::vector<Vec> witness_points(const std::vector<Witness>& ws) {
  std::vector<Vec> out;
  for (const auto& w : ws) out.push_back(w.x);
  return out;
}

// Common last stage of both routes: rescale u so the domination holds with
// constant 1, normalize the domain bound to M^(r)(X), record the bounds and
// the verifier-style residual, and flag infeasibility.
inline void finalize_weights(const OperatorSpec& op, double r, double c, const SolverConfig& cfg, bool with_w1,
                             bool normalize_domain, Vec u, Vec w1, const std::vector<Vec>& seeds,
                             const std::vector<Vec>& tuple, WeightCertificate& cert) {
  const auto& dom = op.domain();
  const auto& cod = op.codomain();
  auto make = [&](const Vec& uu, const Vec& ww) {
    return Domination{&op, r, uu, with_w1 ? std::optional<Vec>(ww) : std::nullopt};
  };
  SearchBudget b = cfg.search;
  b.seed = split_seed(cfg.seed, 0xB0B);
  const SupValue sup = domination_sup(make(u, w1), b, seeds);
  if (std::isinf(sup.value)) {
    cert.feasible = false;
    cert.status = "failed";
    cert.note = "weight vanishes where T x does not";
    cert.omega2 = omega_from_u(u);
    cert.residual = kInf;
    return;
  }
  if (sup.value > 0.0)
    for (auto& v : u) v /= sup.value;

  cert.domain_limit = cert.domain_convexity.value;
  if (with_w1 && normalize_domain) {
    const auto bound = domain_weight_bound(dom.space(), dom.measure(), w1, r, cfg.search);
    if (bound.value > 0.0) {
      // (u, w1) scale together, so the domination is unchanged
      const double s = std::pow(cert.domain_limit / bound.value, r);
      for (auto& v : u) v *= s;
      for (auto& v : w1) v *= s;
    }
  }

  std::vector<Vec> all = seeds;
  if (!sup.x.empty()) all.push_back(sup.x);
  SearchBudget vb = cfg.search;
  vb.seed = split_seed(cfg.seed, 0xFEED);
  SupValue check = domination_sup(make(u, w1), vb, all);
  if (check.value > 1.0 && std::isfinite(check.value)) {
    for (auto& v : u) v /= check.value;
    all.push_back(check.x);
    check = domination_sup(make(u, w1), vb, all);
  }
  cert.residual = std::max(0.0, check.value - 1.0);
  cert.residual_exact = check.exact;

  cert.omega2 = omega_from_u(u);
  if (with_w1) {
    const auto bound = domain_weight_bound(dom.space(), dom.measure(), w1, r, cfg.search);
    cert.omega1 = std::move(w1);
    cert.domain_bound = bound.value;
    cert.domain_bound_exact = bound.exact;
  }
  const auto mn = multiplication_norm(cod.space(), cod.measure(), cert.omega2, r, cfg.search);
  cert.codomain_bound = mn.value;
  cert.codomain_bound_exact = mn.exact;
  cert.codomain_limit = c * cert.codomain_concavity.value;

  if (cert.codomain_bound > cert.codomain_limit * (1.0 + cfg.tolerance)) {
    cert.feasible = false;
    cert.status = "infeasible";
    cert.violating_tuple = tuple;
    if (!tuple.empty()) cert.violating_ratio = vv_ratio(op, tuple, r);
  }
}

inline WeightCertificate start_certificate(const OperatorSpec& op, double r, double c, const SolverConfig& cfg) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("solve_weight_pair: r must be in (0, inf)");
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("solve_weight_pair: C must be in (0, inf)");
  WeightCertificate cert;
  cert.r = r;
  cert.constant = c;
  cert.seed = cfg.seed;
  cert.uses_orlicz_bisection = uses_orlicz(op.domain().space()) || uses_orlicz(op.codomain().space());
  cert.codomain_concavity = resolve_concavity(op.codomain(), r, cfg);
  cert.domain_convexity = resolve_convexity(op.domain(), r, cfg);
  return cert;
}

inline std::vector<Witness> initial_witnesses(const OperatorSpec& op, double r, std::uint64_t seed) {
  std::vector<Witness> ws;
  for (auto& e : unit_vectors(op.in_dim()))
    if (auto w = make_witness(op, std::move(e), r)) ws.push_back(std::move(*w));
  Rng rng(split_seed(seed, 0xA11));
  for (int k = 0; k < 4; ++k)
    if (auto w = make_witness(op, random_signed(rng, op.in_dim()), r)) ws.push_back(std::move(*w));
  return ws;
}

}  // namespace detail

// Direct route. Weights (omega1, omega2) with the domination
//   int |psi T x|^r / omega2 dnu <= int |phi x|^r omega1 dmu   (or ||x||^r)
// and the smallest codomain multiplication norm found: a cutting-plane loop
// whose master problem is solved in its dual form over witness weights.
// The result is normalized so the domain bound equals M^(r)(X); it is
// infeasible when the multiplication norm exceeds C M_(r)(Y) (1 + tol).
inline WeightCertificate solve_weight_pair_direct(const OperatorSpec& op, double r, double c, const SolverConfig& cfg) {
  WeightCertificate cert = detail::start_certificate(op, r, c, cfg);
  const auto& dom = op.domain();
  const auto& nu = op.codomain().measure();
  const std::size_t n_nu = nu.size();

  const auto mode = detail::pair_mode(dom, r);
  bool closed_y = false;
  const double p = detail::resolved_codomain_exponent(op.codomain().space(), closed_y);
  if (!closed_y) cert.note = "numerical: codomain multiplication norm by multi-start search";

  const SpaceDescriptor xr = power_space(dom.space(), r);
  detail::Envelope env(xr, dom.measure());
  std::vector<detail::Witness> ws = detail::initial_witnesses(op, r, cfg.seed);

  Domination dm{&op, r, Vec(n_nu, kInf), std::nullopt};
  if (mode == detail::PairMode::fixed_lr) dm.w1 = Vec(dom.measure().size(), 1.0);
  Vec theta;
  const double cut_tol = std::min(1e-9, cfg.tolerance * 1e-3);
  const bool use_env = mode == detail::PairMode::fitted;

  for (cert.iterations = 0; cert.iterations < cfg.max_rounds && !ws.empty(); ++cert.iterations) {
    if (p < r) {
      theta.resize(ws.size(), 1.0 / static_cast<double>(ws.size()));
      const auto master = detail::solve_master(ws, nu, p, r, use_env ? &env : nullptr, theta, cfg.master_iterations);
      theta = master.theta;
      dm.u = detail::u_from_b(master.b, p, r);
    } else {
      // for p >= r the multiplication norm is a max over atoms; flat in nu^(r/p)
      const double e = (std::isinf(p) ? 0.0 : r / p) - 1.0;
      for (std::size_t i = 0; i < n_nu; ++i) dm.u[i] = std::pow(nu[i], e);
    }
    if (mode == detail::PairMode::fitted) {
      std::vector<Vec> cs;
      Vec hs;
      for (const auto& w : ws) {
        cs.push_back(w.c);
        double h = 0.0;
        for (std::size_t i = 0; i < n_nu; ++i)
          if (w.a[i] > 0.0) h += nu[i] * dm.u[i] * w.a[i];
        hs.push_back(h);
      }
      SearchBudget b = cfg.search;
      b.seed = split_seed(cfg.seed, 0xF17 + cert.iterations);
      const auto fit = detail::fit_domain_weight(cs, hs, env, xr, dom.measure(), b);
      if (!fit.feasible) throw IllPosedError("solve_weight_pair: T x is nonzero where phi x vanishes");
      dm.w1 = fit.w;
    }
    double model = 0.0;
    for (const auto& w : ws) model = std::max(model, dm.ratio(w.x));
    SearchBudget b = cfg.search;
    b.seed = split_seed(cfg.seed, 0x5E9 + cert.iterations);
    const SupValue sup = domination_sup(dm, b, detail::witness_points(ws));
    cert.gap = model > 0.0 ? sup.value / model - 1.0 : 0.0;
    if (!(sup.value > model * (1.0 + cut_tol))) break;
    if (p >= r && mode != detail::PairMode::fitted) break;  // nothing left to refit
    auto w = detail::make_witness(op, sup.x, r);
    if (!w) break;
    ws.push_back(std::move(*w));
  }
  cert.witnesses = ws.size();

  // theta_k^(1/r) x_k is the tuple the master problem found hardest
  std::vector<Vec> tuple;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (theta[k] < 1e-12) continue;
    Vec y = ws[k].x;
    for (auto& v : y) v *= std::pow(theta[k], 1.0 / r);
    tuple.push_back(std::move(y));
  }
  if (tuple.empty() && !ws.empty()) tuple.push_back(ws.front().x);

  if (ws.empty()) dm.u.assign(n_nu, kInf);
  detail::finalize_weights(op, r, c, cfg, mode != detail::PairMode::dirac, mode == detail::PairMode::fitted, dm.u,
                           dm.w1.value_or(Vec{}), detail::witness_points(ws), tuple, cert);
  if (ws.empty()) {
    // T vanishes on all sampled inputs: zero weights
    cert.omega2.assign(n_nu, 0.0);
    cert.codomain_bound = 0.0;
  }
  return cert;
}

// The rescaled route for Y = L_p(nu), p < r. With s = p/2 the form
//   u(x, y) = int |psi T x|^s y dnu  on U x L_2(nu)
// satisfies the minimax hypothesis with exponents r/s and (r/s)' and
// constant C^s; the functional on the second side has a density h and the
// codomain weight is a power of h, the first-side functional gives omega1.
inline WeightCertificate solve_weight_pair_scaled(const OperatorSpec& op, double r, double c, const SolverConfig& cfg) {
  const auto py = lp_exponent(resolve(op.codomain().space()));
  if (!py || !(*py < r)) throw InvalidArgument("scaled route needs Y = L_p with p < r");
  WeightCertificate cert = detail::start_certificate(op, r, c, cfg);
  cert.route = "scaled";
  const auto& dom = op.domain();
  const auto& nu = op.codomain().measure();
  const double s = *py / 2.0;
  const double r1 = r / s, r2 = conjugate(r1);
  const double hyp = std::pow(c, s);

  FormSide first;
  first.dim = op.in_dim();
  first.rep = [&op, s](std::span<const double> x) { return detail::pow_abs(op.source(x), s); };
  first.space = power_space(dom.space(), 1.0 / s);
  first.measure = dom.measure();
  first.r = r1;
  first.convexity = std::pow(cert.domain_convexity.value, s);
  first.degree = s;
  FormSide second;
  second.dim = nu.size();
  second.rep = [](std::span<const double> y) { return Vec(y.begin(), y.end()); };
  second.space = SpaceDescriptor::lp(2.0);
  second.measure = nu;
  second.r = r2;
  second.convexity = 1.0;

  FormSpec form{[&op, &nu, s, hyp](std::span<const double> x, std::span<const double> y) {
                  const Vec img = op.image(x);
                  double v = 0.0;
                  for (std::size_t i = 0; i < img.size(); ++i)
                    if (img[i] != 0.0) v += nu[i] * std::pow(std::fabs(img[i]), s) * y[i];
                  return v / hyp;
                },
                std::move(first), std::move(second)};
  MinimaxConfig mc;
  // The weight meets the codomain limit only up to the minimax accuracy.
  mc.tolerance = std::min(cfg.tolerance, 1e-9);
  mc.max_iterations = cfg.max_rounds * 4;
  mc.seed = split_seed(cfg.seed, 0x5CA1);
  mc.search = cfg.search;
  const MinimaxCertificate mm = solve_minimax(form, mc);
  cert.iterations = mm.iterations;
  cert.witnesses = mm.cuts;
  cert.gap = mm.worst_violation;

  // sup_y u(x, y) / phi2(|y|^r2)^(1/r2) = (sum nu |Tx|^r (nu/g)^(r1-1))^(1/r1) / C^s,
  // so omega2 = C^r g^(r1-1).
  const double cr = std::pow(c, r);
  Vec u(nu.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = mm.phi2[i] > 0.0 ? std::pow(nu[i] / mm.phi2[i], r1 - 1.0) / cr : kInf;
  const bool dirac = dom.kind() == RepresentationKind::B;
  Vec w1(dom.measure().size());
  for (std::size_t j = 0; j < w1.size(); ++j) w1[j] = mm.phi1[j] / dom.measure()[j];

  std::vector<Vec> seeds;
  for (auto& e : detail::unit_vectors(op.in_dim())) seeds.push_back(std::move(e));
  detail::finalize_weights(op, r, c, cfg, !dirac, true, std::move(u), std::move(w1), seeds, {}, cert);
  if (!mm.converged) {
    cert.note = "minimax stage stopped: " + mm.status;
    if (cert.feasible) cert.status = "feasible";
  }
  return cert;
}

inline WeightCertificate solve_weight_pair(const OperatorSpec& op, double r, double c, const SolverConfig& cfg = {}) {
  return cfg.route == SolverConfig::Route::scaled ? solve_weight_pair_scaled(op, r, c, cfg)
                                                  : solve_weight_pair_direct(op, r, c, cfg);
}

// A single domain weight omega1 with ||T x||_F <= (int |phi x|^r omega1 dmu)^(1/r)
// and sup_{||x||_X <= 1} (int |x|^r omega1 dmu)^(1/r) <= C.
inline WeightCertificate solve_weight_domain(const OperatorSpec& op, double r, double c, const SolverConfig& cfg = {}) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("solve_weight_domain: r must be in (0, inf)");
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("solve_weight_domain: C must be in (0, inf)");
  const auto& dom = op.domain();
  const auto& mu = dom.measure();
  WeightCertificate cert;
  cert.r = r;
  cert.constant = c;
  cert.seed = cfg.seed;
  cert.domain_limit = c;
  cert.uses_orlicz_bisection = uses_orlicz(dom.space()) || uses_orlicz(op.codomain().space());

  auto target = [&](std::span<const double> x) {
    const double v = op.codomain().element_norm(op.apply(x));
    return v == 0.0 ? 0.0 : std::pow(v, r);
  };
  auto weighted = [&](const Vec& w, std::span<const double> x) {
    const Vec src = op.source(x);
    double s = 0.0;
    for (std::size_t j = 0; j < src.size(); ++j)
      if (src[j] != 0.0) s += mu[j] * w[j] * std::pow(std::fabs(src[j]), r);
    return s;
  };
  auto ratio = [&](const Vec& w, std::span<const double> x) {
    const double t = target(x);
    if (t == 0.0) return 0.0;
    const double q = weighted(w, x);
    return q == 0.0 ? kInf : t / q;
  };

  std::vector<Vec> xs, cs;
  Vec hs;
  auto add = [&](Vec x) {
    const double h = target(x);
    if (h == 0.0) return false;
    Vec src = op.source(x);
    cs.push_back(detail::pow_abs(src, r));
    hs.push_back(h);
    xs.push_back(std::move(x));
    return true;
  };
  std::vector<Vec> seeds = detail::unit_vectors(op.in_dim());
  if (op.in_dim() <= 10)
    for (auto& v : detail::sign_vertices(op.in_dim(), 512)) seeds.push_back(std::move(v));
  for (const auto& x : seeds) add(x);

  const SpaceDescriptor xr = power_space(dom.space(), r);
  detail::Envelope env(xr, mu);
  Vec w(mu.size(), 0.0);
  double worst = 0.0;
  bool exact_tau = true;
  for (cert.iterations = 0; cert.iterations < cfg.max_rounds && !xs.empty(); ++cert.iterations) {
    SearchBudget b = cfg.search;
    b.seed = split_seed(cfg.seed, 0xD0 + cert.iterations);
    const auto fit = detail::fit_domain_weight(cs, hs, env, xr, mu, b);
    if (!fit.feasible) throw IllPosedError("solve_weight_domain: T x is nonzero where phi x vanishes");
    w = fit.w;
    exact_tau = fit.exact;
    std::vector<Vec> all = seeds;
    all.insert(all.end(), xs.begin(), xs.end());
    const SearchResult res =
        maximize_ratio(op.in_dim(), false, [&](std::span<const double> x) { return ratio(w, x); }, b, all);
    worst = res.value;
    if (!(worst > 1.0 + 1e-9) || !add(res.x)) break;
  }
  cert.witnesses = xs.size();
  if (worst > 1.0 && std::isfinite(worst))
    for (auto& v : w) v *= worst;
  // residual from an independent search
  SearchBudget vb = cfg.search;
  vb.seed = split_seed(cfg.seed, 0xFEED);
  std::vector<Vec> all = seeds;
  all.insert(all.end(), xs.begin(), xs.end());
  const SearchResult check =
      maximize_ratio(op.in_dim(), false, [&](std::span<const double> x) { return ratio(w, x); }, vb, all);
  cert.residual = std::max(0.0, check.value - 1.0);
  cert.residual_exact = false;
  const auto bound = domain_weight_bound(dom.space(), mu, w, r, cfg.search);
  cert.domain_bound = bound.value;
  cert.domain_bound_exact = bound.exact && exact_tau;
  cert.omega1 = std::move(w);
  if (*cert.domain_bound > c * (1.0 + cfg.tolerance)) {
    cert.feasible = false;
    cert.status = "infeasible";
    cert.violating_tuple = xs;
    cert.violating_ratio = *cert.domain_bound;
  }
  return cert;
}

}  // namespace kothe
