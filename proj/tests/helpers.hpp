#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "kothe/operator.hpp"
#include "kothe/rng.hpp"

namespace kothe::testing {

inline DiscreteMeasure mu(Vec w) { return DiscreteMeasure(std::move(w)); }

// T: (R^n, Euclidean) -> L_p(nu) on a Dirac domain atom.
inline OperatorSpec euclidean_into(const Eigen::MatrixXd& t, double p, const DiscreteMeasure& nu) {
  return OperatorSpec::from_matrix(t, Representation::dirac(static_cast<std::size_t>(t.cols()), BlockNorm::lp(2)),
                                   Representation::identity(SpaceDescriptor::lp(p), nu));
}

inline OperatorSpec lattice(const Eigen::MatrixXd& t, SpaceDescriptor x, DiscreteMeasure m, SpaceDescriptor y,
                            DiscreteMeasure n) {
  return lattice_operator(t, std::move(x), std::move(m), std::move(y), std::move(n));
}

// The worked example: R -> L_1(nu), nu = (1, 1), x -> x (1, 1).
inline OperatorSpec r_to_l1() {
  Eigen::MatrixXd t(2, 1);
  t << 1, 1;
  return euclidean_into(t, 1.0, DiscreteMeasure::counting(2));
}

inline Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = uniform(rng, -1.0, 1.0);
  return m;
}

inline Vec random_weights(Rng& rng, std::size_t n) {
  Vec w(n);
  for (auto& v : w) v = uniform(rng, 0.25, 2.0);
  return w;
}

}  // namespace kothe::testing
