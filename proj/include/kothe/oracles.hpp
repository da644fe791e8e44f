#pragma once

// Brute-force reference computations for tests. Nothing here calls into the
// solvers; only norms and closed-form registries are shared.

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kothe/norm.hpp"
#include "kothe/space.hpp"

namespace kothe::oracle {

struct Range {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t steps = 11;

  double at(std::size_t k) const {
    return steps <= 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps - 1);
  }
};

struct GridSpec {
  std::vector<Range> ranges;
  std::size_t cap = 2'000'000;

  std::size_t points() const {
    std::size_t n = 1;
    for (const auto& r : ranges) {
      if (r.steps != 0 && n > cap / r.steps) return cap + 1;
      n *= r.steps;
    }
    return n;
  }
  void check() const {
    if (points() > cap) throw InvalidArgument("GridSpec: grid exceeds the point cap");
  }
  // Calls f on every grid point in lexicographic order.
  template <class F>
  void for_each(F&& f) const {
    check();
    const std::size_t d = ranges.size();
    std::vector<std::size_t> idx(d, 0);
    Vec x(d);
    while (true) {
      for (std::size_t i = 0; i < d; ++i) x[i] = ranges[i].at(idx[i]);
      f(static_cast<const Vec&>(x));
      std::size_t i = 0;
      while (i < d && ++idx[i] == ranges[i].steps) idx[i++] = 0;
      if (i == d) break;
    }
  }
};

inline GridSpec uniform_grid(std::size_t dim, double lo, double hi, std::size_t steps, std::size_t cap = 2'000'000) {
  return GridSpec{std::vector<Range>(dim, Range{lo, hi, steps}), cap};
}

// -- weights ---------------------------------------------------------------

struct WeightSearchResult {
  bool feasible = false;
  Vec omega;                  // best feasible weight on the grid
  double norm = kInf;         // its multiplication norm
  double limit = 0.0;         // C M_(r)(Y)
  std::size_t checked = 0;
};

// Problem data for the brute weight search: |T x| over nu for x on a dense
// direction grid, and the domain quasi-norm of x.
struct WeightProblem {
  std::function<Vec(std::span<const double>)> image;  // |psi T x| over nu
  std::function<double(std::span<const double>)> domain_norm;
  std::size_t in_dim = 1;
  SpaceDescriptor codomain = SpaceDescriptor::lp(1.0);
  DiscreteMeasure nu = DiscreteMeasure::counting(1);
};

namespace detail_oracle {

inline std::vector<Vec> direction_grid(std::size_t n, std::size_t per_axis) {
  std::vector<Vec> out;
  if (n == 1) return {Vec{1.0}};
  const GridSpec g = uniform_grid(n, -1.0, 1.0, per_axis, 200'000);
  g.for_each([&](const Vec& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::fabs(v));
    if (m == 1.0) out.push_back(x);  // boundary of the cube only
  });
  return out;
}

// sup_{||y||_{L_r(nu)} <= 1} ||omega^(1/r) y||_{L_p(nu)}, written out again.
inline double lp_multiplier(const Vec& omega, const DiscreteMeasure& nu, double p, double r) {
  if (p < r) {
    const double s = p * r / (r - p);
    double acc = 0.0;
    for (std::size_t i = 0; i < omega.size(); ++i) acc += nu[i] * std::pow(omega[i], s / r);
    return std::pow(acc, 1.0 / s);
  }
  double m = 0.0;
  const double e = (std::isinf(p) ? 0.0 : 1.0 / p) - 1.0 / r;
  for (std::size_t i = 0; i < omega.size(); ++i) m = std::max(m, std::pow(omega[i], 1.0 / r) * std::pow(nu[i], e));
  return m;
}

}  // namespace detail_oracle

// Exhaustive scan of a weight grid (|nu| <= 4, Y = L_p). A weight passes if
//   sum nu |T x|^r / omega <= ||x||^r (1 + 1e-12)
// on a dense direction grid; the feasible weight with the smallest
// multiplication norm is returned. A single atom is solved by bisection.
inline WeightSearchResult brute_weight_search(const WeightProblem& prob, double r, double c, const GridSpec& grid,
                                              std::size_t per_axis = 41) {
  const std::size_t m = prob.nu.size();
  if (m > 4) throw InvalidArgument("brute_weight_search: at most 4 codomain atoms");
  const auto p = lp_exponent(prob.codomain);
  if (!p) throw InvalidArgument("brute_weight_search: codomain must be an L_p space");
  WeightSearchResult res;
  res.limit = c * registered_concavity(prob.codomain, r, prob.nu).value_or(1.0);

  struct Sample {
    Vec a;  // nu |T x|^r
    double rhs;
  };
  std::vector<Sample> samples;
  for (const auto& x : detail_oracle::direction_grid(prob.in_dim, per_axis)) {
    const Vec img = prob.image(x);
    Sample s{Vec(m), std::pow(prob.domain_norm(x), r)};
    for (std::size_t i = 0; i < m; ++i) s.a[i] = prob.nu[i] * std::pow(std::fabs(img[i]), r);
    samples.push_back(std::move(s));
  }
  auto feasible = [&](const Vec& omega) {
    for (const auto& s : samples) {
      double lhs = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (s.a[i] == 0.0) continue;
        if (omega[i] <= 0.0) return false;
        lhs += s.a[i] / omega[i];
      }
      if (lhs > s.rhs * (1.0 + 1e-12)) return false;
    }
    return true;
  };
  auto consider = [&](const Vec& omega) {
    ++res.checked;
    if (!feasible(omega)) return;
    const double n = detail_oracle::lp_multiplier(omega, prob.nu, *p, r);
    if (n < res.norm) {
      res.norm = n;
      res.omega = omega;
    }
  };
  if (m == 1) {
    double lo = 0.0, hi = 1.0;
    while (!feasible(Vec{hi})) hi *= 2.0;
    for (int k = 0; k < 200; ++k) {
      const double mid = 0.5 * (lo + hi);
      (feasible(Vec{mid}) ? hi : lo) = mid;
    }
    consider(Vec{hi});
  } else {
    if (grid.ranges.size() != m) throw DimensionError("brute_weight_search: one grid range per codomain atom");
    grid.for_each([&](const Vec& omega) { consider(omega); });
  }
  res.feasible = res.norm <= res.limit * (1.0 + 1e-9);
  return res;
}

// -- constants -------------------------------------------------------------

struct TupleSearchResult {
  double value = 0.0;
  std::vector<Vec> witness;
};

// Max convexity (or concavity) ratio over tuples of nonnegative grid vectors,
// n atoms <= 3, tuple size <= 3.
inline TupleSearchResult exhaustive_tuple_search(const SpaceDescriptor& x, const DiscreteMeasure& mu, double r,
                                                 bool convexity, std::size_t tuple_size, std::size_t steps,
                                                 std::size_t cap = 2'000'000) {
  const std::size_t n = mu.size();
  if (n > 3 || tuple_size > 3 || tuple_size == 0) throw InvalidArgument("exhaustive_tuple_search: n, m must be <= 3");
  const GridSpec g = uniform_grid(n * tuple_size, 0.0, 1.0, steps, cap);
  TupleSearchResult res;
  g.for_each([&](const Vec& flat) {
    std::vector<Vec> t(tuple_size);
    Vec sum(n, 0.0);
    double norm_sum = 0.0;
    bool nonzero = false;
    for (std::size_t k = 0; k < tuple_size; ++k) {
      t[k].assign(flat.begin() + static_cast<std::ptrdiff_t>(k * n),
                  flat.begin() + static_cast<std::ptrdiff_t>((k + 1) * n));
      const double nk = norm(x, t[k], mu);
      norm_sum += std::pow(nk, r);
      for (std::size_t i = 0; i < n; ++i) sum[i] += std::pow(t[k][i], r);
      nonzero = nonzero || nk > 0.0;
    }
    if (!nonzero) return;
    for (auto& v : sum) v = std::pow(v, 1.0 / r);
    const double mixed = norm(x, sum, mu), separate = std::pow(norm_sum, 1.0 / r);
    const double v = convexity ? mixed / separate : separate / mixed;
    if (v > res.value) {
      res.value = v;
      res.witness = t;
    }
  });
  return res;
}

// -- hilbert weights -------------------------------------------------------

struct HilbertBracket {
  double lower = 0.0;
  double upper = 0.0;
  Vec omega;  // feasible weight attaining `upper`
  bool feasible = false;  // upper <= C (M_(2)(L_p) = 1 for p <= 2)
  std::size_t iterations = 0;
};

// Minimal multiplication norm ||omega^(1/2)||_{L_s(nu)}, 1/s = 1/p - 1/2,
// subject to lambda_max(T^T diag(nu / omega) T) <= 1 (r = 2, Euclidean
// domain, Y = L_p with p < 2). Frank-Wolfe on the spectraplex for the dual
// (each density Z gives a closed-form relaxed optimum: the lower end), with
// the relaxed optimum rescaled to feasibility as the upper end.
inline HilbertBracket hilbert_weight_oracle(const Eigen::MatrixXd& t, double p, const DiscreteMeasure& nu, double c,
                                            double rel_width = 0.005, std::size_t max_iter = 50000) {
  if (!(p > 0.0 && p < 2.0)) throw InvalidArgument("hilbert_weight_oracle: needs p < 2");
  if (t.rows() > 6 || t.cols() > 6) throw InvalidArgument("hilbert_weight_oracle: dimensions must be <= 6");
  if (static_cast<std::size_t>(t.rows()) != nu.size()) throw DimensionError("hilbert_weight_oracle: rows != |nu|");
  const Eigen::Index m = t.rows(), n = t.cols();
  HilbertBracket res;
  res.omega.assign(static_cast<std::size_t>(m), 0.0);
  if (t.cwiseAbs().maxCoeff() == 0.0) {
    res.feasible = true;
    return res;
  }
  const double s = 2.0 * p / (2.0 - p);
  const double q = s / 2.0;  // objective sum nu u^(-q)
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < m; ++i)
    if (t.row(i).cwiseAbs().maxCoeff() > 0.0) rows.push_back(i);

  auto loads = [&](const Eigen::MatrixXd& z) {
    Vec a(static_cast<std::size_t>(m), 0.0);
    for (auto i : rows) a[i] = nu[i] * t.row(i).dot(z * t.row(i).transpose());
    return a;
  };
  // S(a) = sum nu^(1/(q+1)) a^(q/(q+1)); relaxed optimum value S^((q+1)/s)
  auto s_value = [&](const Vec& a) {
    double v = 0.0;
    for (auto i : rows) v += std::pow(nu[i], 1.0 / (q + 1.0)) * std::pow(std::max(a[i], 0.0), q / (q + 1.0));
    return v;
  };
  auto relaxed_u = [&](const Vec& a) {
    Vec u(static_cast<std::size_t>(m), kInf);
    double kappa = 0.0;
    for (auto i : rows) kappa += std::pow(nu[i], 1.0 / (q + 1.0)) * std::pow(a[i], q / (q + 1.0));
    for (auto i : rows) u[i] = std::pow(nu[i] / a[i], 1.0 / (q + 1.0)) / kappa;
    return u;
  };
  auto objective = [&](const Vec& u) {
    double v = 0.0;
    for (auto i : rows) v += nu[i] * std::pow(u[i], -q);
    return std::pow(v, 1.0 / s);
  };
  auto lambda_max = [&](const Vec& u) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    for (auto i : rows) g += nu[i] * u[i] * t.row(i).transpose() * t.row(i);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    return es;
  };

  Eigen::MatrixXd z = Eigen::MatrixXd::Identity(n, n) / static_cast<double>(n);
  res.upper = kInf;
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    const Vec a = loads(z);
    const double sv = s_value(a);
    res.lower = std::max(res.lower, std::pow(sv, (q + 1.0) / s));
    const Vec u = relaxed_u(a);
    const auto es = lambda_max(u);
    const double lmax = es.eigenvalues()(n - 1);
    // u / lmax is feasible
    Vec uf = u;
    for (auto& v : uf) v /= lmax;
    const double up = objective(uf);
    if (up < res.upper) {
      res.upper = up;
      for (std::size_t i = 0; i < uf.size(); ++i) res.omega[i] = std::isinf(uf[i]) ? 0.0 : 1.0 / uf[i];
    }
    if (res.upper <= res.lower * (1.0 + rel_width)) break;
    // Frank-Wolfe step toward the top eigenvector of the gradient u(a)
    const Eigen::VectorXd v = es.eigenvectors().col(n - 1);
    const Eigen::MatrixXd vertex = v * v.transpose();
    double lo = 0.0, hi = 1.0;
    for (int k = 0; k < 60; ++k) {  // S is concave along the segment
      const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      const double f1 = s_value(loads((1.0 - m1) * z + m1 * vertex));
      const double f2 = s_value(loads((1.0 - m2) * z + m2 * vertex));
      (f1 < f2 ? lo : hi) = f1 < f2 ? m1 : m2;
    }
    const double step = 0.5 * (lo + hi);
    z = (1.0 - step) * z + step * vertex;
  }
  res.feasible = res.upper <= c * (1.0 + 1e-9);
  return res;
}

// -- convexification -------------------------------------------------------

// inf sum ||x_k|| over splittings |x| = sum |x_k| into `pieces` parts with
// grid fractions per atom (atoms <= 3).
inline double brute_convexification(const SpaceDescriptor& space, std::span<const double> x, const DiscreteMeasure& mu,
                                    std::size_t pieces = 2, std::size_t steps = 21) {
  const std::size_t n = mu.size();
  if (n > 3 || pieces < 1 || pieces > 3) throw InvalidArgument("brute_convexification: atoms and pieces must be <= 3");
  // per atom a fraction vector over pieces; pieces - 1 free fractions per atom
  const GridSpec g = uniform_grid(n * (pieces - 1), 0.0, 1.0, steps);
  double best = norm(space, x, mu);
  if (pieces == 1) return best;
  g.for_each([&](const Vec& f) {
    std::vector<Vec> parts(pieces, Vec(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      double rest = 1.0;
      for (std::size_t k = 0; k + 1 < pieces; ++k) {
        const double share = std::min(rest, f[i * (pieces - 1) + k]);
        parts[k][i] = share * std::fabs(x[i]);
        rest -= share;
      }
      parts[pieces - 1][i] = rest * std::fabs(x[i]);
    }
    double total = 0.0;
    for (const auto& part : parts) total += norm(space, part, mu);
    best = std::min(best, total);
  });
  return best;
}

// -- quasi-ball duals --------------------------------------------------------

// sup <mu v, z> / ||z|| over nonnegative grid points z of the cube.
inline double grid_dual_norm(const SpaceDescriptor& space, std::span<const double> v, const DiscreteMeasure& mu,
                             std::size_t steps = 41) {
  const GridSpec g = uniform_grid(mu.size(), 0.0, 1.0, steps);
  double best = 0.0;
  g.for_each([&](const Vec& z) {
    const double nz = norm(space, z, mu);
    if (nz == 0.0) return;
    double s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) s += mu[i] * std::fabs(v[i]) * z[i];
    best = std::max(best, s / nz);
  });
  return best;
}

// Feasibility of a pair of functionals for the bilinear form
// u(x, y) = sum mu x y on L_2 x L_2: |u| <= phi1(x^2)^(1/2) phi2(y^2)^(1/2)
// on a sign/direction grid, plus membership in the L_1(mu) dual balls.
inline bool grid_minimax_feasible(const Vec& phi1, const Vec& phi2, const DiscreteMeasure& mu, double tol = 1e-6,
                                  std::size_t per_axis = 21) {
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (phi1[i] < -tol || phi2[i] < -tol || phi1[i] > mu[i] * (1.0 + tol) || phi2[i] > mu[i] * (1.0 + tol))
      return false;
  const auto dirs = detail_oracle::direction_grid(mu.size(), per_axis);
  for (const auto& x : dirs)
    for (const auto& y : dirs) {
      double uv = 0.0, a = 0.0, b = 0.0;
      for (std::size_t i = 0; i < mu.size(); ++i) {
        uv += mu[i] * x[i] * y[i];
        a += phi1[i] * x[i] * x[i];
        b += phi2[i] * y[i] * y[i];
      }
      if (std::fabs(uv) > std::sqrt(a * b) * (1.0 + tol) + 1e-15) return false;
    }
  return true;
}

}  // namespace kothe::oracle
