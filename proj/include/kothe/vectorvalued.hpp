#pragma once

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kothe/constants.hpp"
#include "kothe/operator.hpp"
#include "kothe/representation.hpp"

namespace kothe {

// Linear operator X(mu, E) -> Y(nu, F) acting on per-atom blocks: a dense
// (|nu| dim F) x (|mu| dim E) matrix, blocks laid out atom by atom.
struct BlockOperator {
  Eigen::MatrixXd matrix;
  VectorValuedSpace domain;
  VectorValuedSpace codomain;

  void check() const {
    const auto cols = static_cast<Eigen::Index>(domain.measure.size() * domain.block_dim);
    const auto rows = static_cast<Eigen::Index>(codomain.measure.size() * codomain.block_dim);
    if (matrix.cols() != cols || matrix.rows() != rows)
      throw DimensionError("BlockOperator: matrix is " + std::to_string(matrix.rows()) + "x" +
                           std::to_string(matrix.cols()) + ", block shapes need " + std::to_string(rows) + "x" +
                           std::to_string(cols));
  }
};

namespace detail {

// A one-dimensional block norm that is the absolute value.
inline bool is_abs_value(const VectorValuedSpace& s) {
  if (s.block_dim != 1) return false;
  const double one[1] = {1.0}, minus[1] = {-1.0};
  return s.inner(one) == 1.0 && s.inner(minus) == 1.0;
}

inline Representation block_representation(const VectorValuedSpace& s) {
  // Scalar blocks are the lattice itself; this keeps the scalar pipeline
  // (and its exact inner checks) intact.
  if (is_abs_value(s)) return Representation::identity(s.outer, s.measure);
  return s.representation();
}

}  // namespace detail

// Representation-level data of a block operator: phi x = ||x||_E(.) and
// psi(T x) = ||T x||_F(.), ready for solve_weight_pair.
inline OperatorSpec lift_vector_valued(const BlockOperator& t) {
  t.check();
  return OperatorSpec::from_matrix(t.matrix, detail::block_representation(t.domain),
                                   detail::block_representation(t.codomain));
}

// Largest ratio || (sum ||T x_k||_F^r)^(1/r) ||_Y / || (sum ||x_k||_E^r)^(1/r) ||_X
// over the given tuples.
inline double check_vv_inequality(const OperatorSpec& op, double r, std::span<const std::vector<Vec>> tuples) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("check_vv_inequality: r must be in (0, inf)");
  double worst = 0.0;
  for (const auto& t : tuples) {
    if (t.empty()) continue;
    for (const auto& x : t)
      if (x.size() != op.in_dim()) throw DimensionError("check_vv_inequality: element of wrong length");
    worst = std::max(worst, vv_ratio(op, t, r));
  }
  return worst;
}

inline double check_vv_inequality(const BlockOperator& t, double r, std::span<const std::vector<Vec>> tuples) {
  return check_vv_inequality(lift_vector_valued(t), r, tuples);
}

// Lower bound for the best constant in the vector-valued inequality, by
// multi-start search over signed tuples.
inline ConstantEstimate estimate_vv_constant(const OperatorSpec& op, double r, const ConstantBudget& budget = {}) {
  auto ratio = [&](std::span<const Vec> vs) {
    bool nonzero = false;
    for (const auto& v : vs) nonzero = nonzero || !detail::all_zero(v);
    if (!nonzero) return -kInf;
    const double v = vv_ratio(op, vs, r);
    return std::isnan(v) ? -kInf : v;
  };
  ConstantEstimate est = detail::run_estimate(op.in_dim(), false, r, ConstantKind::convexity, budget, ratio);
  est.value = vv_ratio(op, est.witness.vectors, r);
  return est;
}

}  // namespace kothe
