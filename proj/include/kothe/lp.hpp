#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kothe/error.hpp"
#include "kothe/measure.hpp"

namespace kothe::lp {

enum class Sense { le, ge, eq };
enum class Status { optimal, infeasible, unbounded, iteration_limit };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::optimal:
      return "optimal";
    case Status::infeasible:
      return "infeasible";
    case Status::unbounded:
      return "unbounded";
    case Status::iteration_limit:
      return "iteration_limit";
  }
  return "?";
}

// optimize c^T x  s.t.  rows (le|ge|eq) rhs,  x >= 0.
struct LinearProgram {
  bool maximize = false;
  Vec objective;
  std::vector<Vec> rows;
  std::vector<Sense> senses;
  Vec rhs;

  explicit LinearProgram(std::size_t n_vars = 0) : objective(n_vars, 0.0) {}

  std::size_t num_vars() const { return objective.size(); }
  std::size_t num_rows() const { return rows.size(); }

  void add_row(Vec coeffs, Sense s, double b) {
    if (coeffs.size() != objective.size()) throw DimensionError("LinearProgram::add_row: wrong length");
    rows.push_back(std::move(coeffs));
    senses.push_back(s);
    rhs.push_back(b);
  }
};

struct Options {
  double tolerance = 1e-9;
  std::size_t max_iterations = 200000;
  std::size_t refactor_every = 50;
};

struct Result {
  Status status = Status::iteration_limit;
  Vec x;
  double objective = 0.0;
  // d(objective)/d(rhs_i) for the problem as stated (sign follows the
  // optimization sense).
  Vec duals;
  std::size_t iterations = 0;
};

namespace detail {

// Revised simplex on  min c^T x, A x = b, x >= 0, b >= 0, with an explicit
// dense basis inverse and Bland's rule for both pricing and ratio ties.
class RevisedSimplex {
 public:
  RevisedSimplex(Eigen::MatrixXd a, Eigen::VectorXd b, std::vector<std::ptrdiff_t> basis, const Options& opt)
      : a_(std::move(a)), b_(std::move(b)), basis_(std::move(basis)), opt_(opt) {
    refactor();
  }

  // Runs to optimality for the given costs; columns with allowed[j] == false
  // never enter.
  Status run(const Eigen::VectorXd& cost, const std::vector<bool>& allowed, std::size_t& iterations) {
    const std::ptrdiff_t m = a_.rows(), n = a_.cols();
    std::size_t since_refactor = 0;
    while (true) {
      if (iterations >= opt_.max_iterations) return Status::iteration_limit;
      if (since_refactor >= opt_.refactor_every) {
        refactor();
        since_refactor = 0;
      }
      Eigen::VectorXd cb(m);
      for (std::ptrdiff_t i = 0; i < m; ++i) cb[i] = cost[basis_[i]];
      const Eigen::RowVectorXd y = cb.transpose() * binv_;
      std::vector<bool> in_basis(n, false);
      for (auto j : basis_) in_basis[j] = true;

      std::ptrdiff_t enter = -1;
      for (std::ptrdiff_t j = 0; j < n; ++j) {
        if (in_basis[j] || !allowed[j]) continue;
        const double d = cost[j] - y.dot(a_.col(j));
        if (d < -opt_.tolerance) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return Status::optimal;

      const Eigen::VectorXd alpha = binv_ * a_.col(enter);
      std::ptrdiff_t leave = -1;
      double best_ratio = kInfinity;
      for (std::ptrdiff_t i = 0; i < m; ++i) {
        if (alpha[i] <= kPivotTol) continue;
        const double ratio = std::max(0.0, xb_[i]) / alpha[i];
        const double slack = 1e-12 * (1.0 + (leave < 0 ? ratio : best_ratio));
        if (leave < 0 || ratio < best_ratio - slack ||
            (std::fabs(ratio - best_ratio) <= slack && basis_[i] < basis_[leave])) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave < 0) return Status::unbounded;
      pivot(leave, enter, alpha);
      ++iterations;
      ++since_refactor;
    }
  }

  // Pivots a basic column at zero level out of the basis if some allowed
  // column has a nonzero entry in its row. Returns false for redundant rows.
  bool drive_out(std::ptrdiff_t row, const std::vector<bool>& allowed) {
    const Eigen::RowVectorXd r = binv_.row(row) * a_;
    std::vector<bool> in_basis(a_.cols(), false);
    for (auto j : basis_) in_basis[j] = true;
    for (std::ptrdiff_t j = 0; j < a_.cols(); ++j) {
      if (in_basis[j] || !allowed[j]) continue;
      if (std::fabs(r[j]) > 1e-9) {
        const Eigen::VectorXd alpha = binv_ * a_.col(j);
        pivot(row, j, alpha);
        return true;
      }
    }
    return false;
  }

  void refactor() {
    const std::ptrdiff_t m = a_.rows();
    Eigen::MatrixXd bmat(m, m);
    for (std::ptrdiff_t i = 0; i < m; ++i) bmat.col(i) = a_.col(basis_[i]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(bmat);
    if (!lu.isInvertible()) throw NumericalError("LP: singular basis");
    binv_ = lu.inverse();
    xb_ = binv_ * b_;
  }

  const std::vector<std::ptrdiff_t>& basis() const { return basis_; }
  const Eigen::VectorXd& basic_values() const { return xb_; }
  const Eigen::MatrixXd& basis_inverse() const { return binv_; }

 private:
  static constexpr double kInfinity = std::numeric_limits<double>::infinity();
  static constexpr double kPivotTol = 1e-11;

  void pivot(std::ptrdiff_t leave, std::ptrdiff_t enter, const Eigen::VectorXd& alpha) {
    const double piv = alpha[leave];
    binv_.row(leave) /= piv;
    xb_[leave] /= piv;
    for (std::ptrdiff_t i = 0; i < binv_.rows(); ++i) {
      if (i == leave || alpha[i] == 0.0) continue;
      binv_.row(i) -= alpha[i] * binv_.row(leave);
      xb_[i] -= alpha[i] * xb_[leave];
    }
    basis_[leave] = enter;
  }

  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  std::vector<std::ptrdiff_t> basis_;
  Options opt_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd xb_;
};

}  // namespace detail

// Two-phase revised simplex with Bland's rule. Self-contained; intended for
// the small dense programs produced by the cutting-plane solvers.
inline Result solve(const LinearProgram& lp, const Options& opt = {}) {
  const std::size_t n = lp.num_vars(), m = lp.num_rows();
  Result res;
  if (m == 0) {
    res.x.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double c = lp.maximize ? -lp.objective[j] : lp.objective[j];
      if (c < -opt.tolerance) {
        res.status = Status::unbounded;
        return res;
      }
    }
    res.status = Status::optimal;
    return res;
  }

  // Normalize to b >= 0 and count auxiliary columns.
  std::vector<double> flip(m, 1.0);
  std::vector<Sense> sense(lp.senses);
  for (std::size_t i = 0; i < m; ++i) {
    if (lp.rhs[i] < 0.0) {
      flip[i] = -1.0;
      if (sense[i] == Sense::le)
        sense[i] = Sense::ge;
      else if (sense[i] == Sense::ge)
        sense[i] = Sense::le;
    }
  }
  std::size_t n_slack = 0, n_art = 0;
  for (auto s : sense) {
    if (s != Sense::eq) ++n_slack;
    if (s != Sense::le) ++n_art;
  }
  const std::size_t total = n + n_slack + n_art;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(total));
  Eigen::VectorXd b(static_cast<Eigen::Index>(m));
  std::vector<std::ptrdiff_t> basis(m);
  std::vector<bool> is_art(total, false);
  std::size_t slack = n, art = n + n_slack;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) = flip[i] * lp.rows[i][j];
    b[i] = flip[i] * lp.rhs[i];
    if (sense[i] == Sense::le) {
      a(i, slack) = 1.0;
      basis[i] = static_cast<std::ptrdiff_t>(slack++);
    } else {
      if (sense[i] == Sense::ge) a(i, slack++) = -1.0;
      a(i, art) = 1.0;
      is_art[art] = true;
      basis[i] = static_cast<std::ptrdiff_t>(art++);
    }
  }

  detail::RevisedSimplex simplex(a, b, basis, opt);
  std::vector<bool> allowed(total, true);
  if (n_art > 0) {
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
    for (std::size_t j = 0; j < total; ++j)
      if (is_art[j]) c1[j] = 1.0;
    const Status s1 = simplex.run(c1, allowed, res.iterations);
    if (s1 == Status::iteration_limit) {
      res.status = s1;
      return res;
    }
    simplex.refactor();
    double infeas = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      if (is_art[simplex.basis()[i]]) infeas += std::max(0.0, simplex.basic_values()[i]);
    if (infeas > opt.tolerance * (1.0 + b.lpNorm<Eigen::Infinity>()) * 10.0) {
      res.status = Status::infeasible;
      return res;
    }
    for (std::size_t j = 0; j < total; ++j)
      if (is_art[j]) allowed[j] = false;
    for (std::size_t i = 0; i < m; ++i)
      if (is_art[simplex.basis()[i]]) simplex.drive_out(static_cast<std::ptrdiff_t>(i), allowed);
    simplex.refactor();
  }

  Eigen::VectorXd c2 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
  for (std::size_t j = 0; j < n; ++j) c2[j] = lp.maximize ? -lp.objective[j] : lp.objective[j];
  const Status s2 = simplex.run(c2, allowed, res.iterations);
  res.status = s2;
  if (s2 != Status::optimal) return res;
  simplex.refactor();

  res.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const auto j = simplex.basis()[i];
    if (j < static_cast<std::ptrdiff_t>(n)) res.x[j] = std::max(0.0, simplex.basic_values()[i]);
  }
  res.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) res.objective += lp.objective[j] * res.x[j];

  Eigen::VectorXd cb(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) cb[i] = c2[simplex.basis()[i]];
  const Eigen::RowVectorXd y = cb.transpose() * simplex.basis_inverse();
  res.duals.resize(m);
  const double sign = lp.maximize ? -1.0 : 1.0;
  for (std::size_t i = 0; i < m; ++i) res.duals[i] = sign * flip[i] * y[i];
  return res;
}

}  // namespace kothe::lp
