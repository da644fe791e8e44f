#pragma once

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kothe/certificates.hpp"
#include "kothe/operator.hpp"
#include "kothe/search.hpp"
#include "kothe/weights.hpp"

namespace kothe {

namespace detail {

inline Eigen::MatrixXd operator_matrix(const OperatorSpec& op) {
  if (!op.linear()) throw InvalidArgument("factorization: operator must be linear");
  if (op.matrix()) return *op.matrix();
  Eigen::MatrixXd t(op.out_dim(), op.in_dim());
  for (std::size_t j = 0; j < op.in_dim(); ++j) {
    Vec e(op.in_dim(), 0.0);
    e[j] = 1.0;
    const Vec col = op.apply(e);
    for (std::size_t i = 0; i < col.size(); ++i) t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
  }
  return t;
}

inline Vec matvec(const Eigen::MatrixXd& m, std::span<const double> x) {
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd y = m * xv;
  return Vec(y.data(), y.data() + y.size());
}

// max over sample inputs of |T x - composed x| relative to 1 + |T x|.
template <class Composed>
double composition_error(const OperatorSpec& op, Composed&& composed, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  std::vector<Vec> xs = unit_vectors(op.in_dim());
  for (int k = 0; k < 64; ++k) xs.push_back(random_signed(rng, op.in_dim()));
  for (const auto& x : xs) {
    const Vec a = op.apply(x), b = composed(x);
    for (std::size_t i = 0; i < a.size(); ++i)
      worst = std::max(worst, std::fabs(a[i] - b[i]) / (1.0 + std::fabs(a[i])));
  }
  return worst;
}

}  // namespace detail

// T = M_g o R with g = omega2^(1/r) and R x = T x / g (0 where g = 0):
// ||R : E -> L_r(nu)|| <= M^(r)(X) and ||M_g : L_r(nu) -> Y|| <= C M_(r)(Y).
inline FactorizationResult build_factorization_range(const WeightCertificate& cert, const OperatorSpec& op,
                                                     const SolverConfig& cfg = {}) {
  if (cert.omega2.empty()) throw InvalidArgument("build_factorization_range: certificate has no codomain weight");
  if (op.codomain().kind() != RepresentationKind::C)
    throw InvalidArgument("build_factorization_range: codomain must be the lattice itself");
  const Eigen::MatrixXd t = detail::operator_matrix(op);
  const double r = cert.r;
  FactorizationResult f;
  f.side = FactorizationResult::Side::range;
  f.multiplier.resize(cert.omega2.size());
  for (std::size_t i = 0; i < f.multiplier.size(); ++i)
    f.multiplier[i] = cert.omega2[i] == 0.0 ? 0.0 : std::pow(cert.omega2[i], 1.0 / r);
  f.r_matrix = t;
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    const double g = f.multiplier[static_cast<std::size_t>(i)];
    f.r_matrix.row(i) = g > 0.0 ? Eigen::RowVectorXd(t.row(i) / g) : Eigen::RowVectorXd::Zero(t.cols());
  }

  const auto& nu = op.codomain().measure();
  f.multiplier_norm = multiplication_norm(op.codomain().space(), nu, cert.omega2, r, cfg.search).value;
  // ||R x||_{L_r(nu)}^r = sum nu |T x|^r / omega2: the domination left side
  const OperatorSpec rop = OperatorSpec::from_matrix(
      f.r_matrix, op.domain(), Representation::identity(SpaceDescriptor::lp(r), nu));
  Domination d{&rop, r, Vec(nu.size(), 1.0), std::nullopt};
  SearchBudget b = cfg.search;
  b.seed = split_seed(cfg.seed, 0xFAC1);
  const SupValue s = domination_sup(d, b);
  f.r_norm = s.value == 0.0 ? 0.0 : std::pow(s.value, 1.0 / r);
  f.r_norm_exact = s.exact;
  f.norm_product = f.multiplier_norm * f.r_norm;
  f.bound = cert.codomain_limit * cert.domain_limit;
  const Eigen::MatrixXd rm = f.r_matrix;
  const Vec g = f.multiplier;
  f.composition_residual = detail::composition_error(
      op,
      [&](std::span<const double> x) {
        Vec y = detail::matvec(rm, x);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] *= g[i];
        return y;
      },
      split_seed(cfg.seed, 0xC0));
  return f;
}

// T = R o M_f with f = omega1^(1/r): R (f x) = T x on the range of M_f and
// R = 0 on the band where f vanishes.
inline FactorizationResult build_factorization_domain(const WeightCertificate& cert, const OperatorSpec& op,
                                                      const SolverConfig& cfg = {}) {
  if (!cert.omega1) throw InvalidArgument("build_factorization_domain: certificate has no domain weight");
  if (op.domain().kind() != RepresentationKind::C)
    throw InvalidArgument("build_factorization_domain: domain must be the lattice itself");
  const Eigen::MatrixXd t = detail::operator_matrix(op);
  const double r = cert.r;
  const auto& mu = op.domain().measure();
  FactorizationResult f;
  f.side = FactorizationResult::Side::domain;
  f.multiplier.resize(cert.omega1->size());
  for (std::size_t j = 0; j < f.multiplier.size(); ++j)
    f.multiplier[j] = (*cert.omega1)[j] == 0.0 ? 0.0 : std::pow((*cert.omega1)[j], 1.0 / r);
  f.r_matrix = t;
  const double scale = t.cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < t.cols(); ++j) {
    const double fj = f.multiplier[static_cast<std::size_t>(j)];
    if (fj > 0.0) {
      f.r_matrix.col(j) = t.col(j) / fj;
    } else {
      if (t.col(j).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + scale))
        throw IllPosedError("build_factorization_domain: T x is nonzero where f vanishes");
      f.r_matrix.col(j).setZero();
    }
  }

  f.multiplier_norm = domain_weight_bound(op.domain().space(), mu, *cert.omega1, r, cfg.search).value;
  // ||R : L_r(mu) -> F||
  const OperatorSpec rop =
      OperatorSpec::from_matrix(f.r_matrix, Representation::identity(SpaceDescriptor::lp(r), mu), op.codomain());
  SearchBudget b = cfg.search;
  b.seed = split_seed(cfg.seed, 0xFAC2);
  const bool quad = r == 2.0 && rop.codomain().quadratic_form().has_value();
  if (quad) {
    const Vec q = *rop.codomain().quadratic_form();
    Eigen::MatrixXd a = f.r_matrix;
    for (Eigen::Index i = 0; i < a.rows(); ++i) a.row(i) *= std::sqrt(q[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < a.cols(); ++j) a.col(j) /= std::sqrt(mu[static_cast<std::size_t>(j)]);
    f.r_norm = a.rows() == 0 || a.cols() == 0 ? 0.0 : Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0);
    f.r_norm_exact = true;
  } else {
    auto ratio = [&](std::span<const double> y) {
      const double den = detail::weighted_lp(y, mu.weights(), r);
      return den == 0.0 ? -kInf : rop.codomain().element_norm(rop.apply(y)) / den;
    };
    std::vector<Vec> seeds = detail::unit_vectors(op.in_dim());
    for (auto& v : detail::sign_vertices(op.in_dim(), 256)) {
      for (std::size_t j = 0; j < v.size(); ++j) v[j] *= f.multiplier[j];
      if (!detail::all_zero(v)) seeds.push_back(std::move(v));
    }
    f.r_norm = std::max(0.0, maximize_ratio(op.in_dim(), false, ratio, b, seeds).value);
    f.r_norm_exact = false;
  }
  f.norm_product = f.multiplier_norm * f.r_norm;
  f.bound = cert.domain_limit;
  const Eigen::MatrixXd rm = f.r_matrix;
  const Vec fm = f.multiplier;
  f.composition_residual = detail::composition_error(
      op,
      [&](std::span<const double> x) {
        Vec y(x.begin(), x.end());
        for (std::size_t j = 0; j < y.size(); ++j) y[j] *= fm[j];
        return detail::matvec(rm, y);
      },
      split_seed(cfg.seed, 0xC1));
  return f;
}

}  // namespace kothe
