#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kothe/norm.hpp"
#include "kothe/representation.hpp"
#include "kothe/rng.hpp"

namespace kothe {

using VecMap = std::function<Vec(std::span<const double>)>;

// Homogeneous map T: U -> V together with the representations
// phi: U -> X(mu) (domain) and psi: V -> Y(nu) (codomain).
class OperatorSpec {
 public:
  static OperatorSpec from_matrix(Eigen::MatrixXd t, Representation domain, Representation codomain) {
    if (static_cast<std::size_t>(t.cols()) != domain.input_dim() ||
        static_cast<std::size_t>(t.rows()) != codomain.input_dim())
      throw DimensionError("OperatorSpec: matrix is " + std::to_string(t.rows()) + "x" + std::to_string(t.cols()) +
                           ", representations expect " + std::to_string(codomain.input_dim()) + "x" +
                           std::to_string(domain.input_dim()));
    auto shared = std::make_shared<const Eigen::MatrixXd>(std::move(t));
    VecMap f = [shared](std::span<const double> x) {
      const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
      const Eigen::VectorXd y = (*shared) * xv;
      return Vec(y.data(), y.data() + y.size());
    };
    OperatorSpec op(std::move(f), std::move(domain), std::move(codomain), true);
    op.matrix_ = shared;
    return op;
  }

  static OperatorSpec from_callback(VecMap f, Representation domain, Representation codomain, bool linear) {
    if (!f) throw InvalidArgument("OperatorSpec: empty callback");
    OperatorSpec op(std::move(f), std::move(domain), std::move(codomain), linear);
    op.check_homogeneous();
    return op;
  }

  std::size_t in_dim() const { return domain_.input_dim(); }
  std::size_t out_dim() const { return codomain_.input_dim(); }
  bool linear() const { return linear_; }
  const Representation& domain() const { return domain_; }
  const Representation& codomain() const { return codomain_; }
  const Eigen::MatrixXd* matrix() const { return matrix_.get(); }

  Vec apply(std::span<const double> x) const {
    Vec y = f_(x);
    if (y.size() != out_dim()) throw DimensionError("OperatorSpec: callback returned wrong length");
    return y;
  }
  // psi(Tx) as lattice values over nu.
  Vec image(std::span<const double> x) const { return codomain_.apply(apply(x)); }
  // phi(x) as lattice values over mu.
  Vec source(std::span<const double> x) const { return domain_.apply(x); }

  // alpha T with the same representations.
  OperatorSpec scaled(double alpha) const {
    OperatorSpec op = *this;
    auto f = f_;
    op.f_ = [f, alpha](std::span<const double> x) {
      Vec y = f(x);
      for (auto& v : y) v *= alpha;
      return y;
    };
    if (matrix_) op.matrix_ = std::make_shared<const Eigen::MatrixXd>(alpha * (*matrix_));
    return op;
  }

 private:
  OperatorSpec(VecMap f, Representation domain, Representation codomain, bool linear)
      : f_(std::move(f)), domain_(std::move(domain)), codomain_(std::move(codomain)), linear_(linear) {}

  void check_homogeneous() const {
    Rng rng(0xC0FFEE);
    for (int k = 0; k < 8; ++k) {
      const Vec x = random_signed(rng, in_dim());
      const double lambda = k % 2 == 0 ? 0.25 : 4.0;
      Vec y = x;
      for (auto& v : y) v *= lambda;
      const Vec a = apply(x), b = apply(y);
      for (std::size_t i = 0; i < a.size(); ++i)
        if (std::fabs(b[i] - lambda * a[i]) > 1e-9 * (1.0 + std::fabs(lambda * a[i])))
          throw InvalidArgument("OperatorSpec: map is not positively homogeneous");
    }
  }

  VecMap f_;
  std::shared_ptr<const Eigen::MatrixXd> matrix_;
  Representation domain_;
  Representation codomain_;
  bool linear_;
};

// Lattice operator given by a matrix between X(mu) and Y(nu) (kind C on both
// sides).
inline OperatorSpec lattice_operator(Eigen::MatrixXd t, SpaceDescriptor x, DiscreteMeasure mu,
                                     SpaceDescriptor y, DiscreteMeasure nu) {
  return OperatorSpec::from_matrix(std::move(t), Representation::identity(std::move(x), std::move(mu)),
                                   Representation::identity(std::move(y), std::move(nu)));
}

// Pointwise (sum_k |v_k|^r)^(1/r) of lattice functions.
inline Vec r_sum(std::span<const Vec> vs, double r) {
  if (vs.empty()) throw InvalidArgument("r_sum: empty tuple");
  const std::size_t n = vs.front().size();
  Vec out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double m = 0.0;
    for (const auto& v : vs) m = std::max(m, std::fabs(v[i]));
    if (m == 0.0) continue;
    double s = 0.0;
    for (const auto& v : vs) s += std::pow(std::fabs(v[i]) / m, r);
    out[i] = m * std::pow(s, 1.0 / r);
  }
  return out;
}

// (sum_k a_k^r)^(1/r) of nonnegative numbers.
inline double r_mean(std::span<const double> a, double r) {
  const Vec w(a.size(), 1.0);
  return detail::weighted_lp(a, w, r);
}

namespace detail {
inline double safe_ratio(double num, double den) {
  if (den == 0.0) return num == 0.0 ? 0.0 : kInf;
  return num / den;
}
}  // namespace detail

// || (sum |psi T x_k|^r)^(1/r) ||_Y / || (sum |phi x_k|^r)^(1/r) ||_X
inline double vv_ratio(const OperatorSpec& op, std::span<const Vec> xs, double r) {
  std::vector<Vec> img, src;
  for (const auto& x : xs) {
    img.push_back(op.image(x));
    src.push_back(op.source(x));
  }
  const auto& cod = op.codomain();
  const auto& dom = op.domain();
  return detail::safe_ratio(norm(cod.space(), r_sum(img, r), cod.measure()),
                            norm(dom.space(), r_sum(src, r), dom.measure()));
}

// || (sum |psi T x_k|^r)^(1/r) ||_Y / (sum ||x_k||^r)^(1/r)
inline double operator_convexity_ratio(const OperatorSpec& op, std::span<const Vec> xs, double r) {
  std::vector<Vec> img;
  Vec norms;
  for (const auto& x : xs) {
    img.push_back(op.image(x));
    norms.push_back(op.domain().element_norm(x));
  }
  const auto& cod = op.codomain();
  return detail::safe_ratio(norm(cod.space(), r_sum(img, r), cod.measure()), r_mean(norms, r));
}

// (sum ||psi T x_k||^r)^(1/r) / || (sum |phi x_k|^r)^(1/r) ||_X
inline double operator_concavity_ratio(const OperatorSpec& op, std::span<const Vec> xs, double r) {
  std::vector<Vec> src;
  Vec norms;
  for (const auto& x : xs) {
    src.push_back(op.source(x));
    norms.push_back(norm(op.codomain().space(), op.image(x), op.codomain().measure()));
  }
  const auto& dom = op.domain();
  return detail::safe_ratio(r_mean(norms, r), norm(dom.space(), r_sum(src, r), dom.measure()));
}

}  // namespace kothe
