#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kothe/norm.hpp"
#include "kothe/rng.hpp"
#include "kothe/space.hpp"

namespace kothe {

// Quasi-norm on R^d used inside blocks. p is set for the l_p^d norms.
struct BlockNorm {
  std::function<double(std::span<const double>)> fn;
  std::optional<double> p;
  std::string name;

  static BlockNorm lp(double p) {
    if (!(p > 0.0)) throw InvalidArgument("BlockNorm: p must be > 0");
    return {[p](std::span<const double> v) {
              Vec w(v.size(), 1.0);
              return detail::weighted_lp(v, w, p);
            },
            p, "l_" + detail::fmt_exp(p)};
  }
  static BlockNorm custom(std::function<double(std::span<const double>)> f, std::string name) {
    if (!f) throw InvalidArgument("BlockNorm: empty callable");
    return {std::move(f), std::nullopt, std::move(name)};
  }

  double operator()(std::span<const double> v) const { return fn(v); }
};

enum class RepresentationKind { A, B, C, D, E };

inline const char* to_string(RepresentationKind k) {
  constexpr const char* names[] = {"A", "B", "C", "D", "E"};
  return names[static_cast<int>(k)];
}

// Positively homogeneous map phi from R^input_dim into a lattice X(measure).
//   A: x -> (<x', x>)_{x' in grid}, X = l_inf(grid)
//   B: x -> ||x||_E on a single Dirac atom
//   C: x -> x, X(mu) itself
//   D: L_r(mu, E), implemented as E with X = L_r
//   E: x -> (||x_i||_E)_i for per-atom blocks x_i in R^block_dim
class Representation {
 public:
  RepresentationKind kind() const { return kind_; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t block_dim() const { return block_dim_; }
  const SpaceDescriptor& space() const { return space_; }
  const DiscreteMeasure& measure() const { return measure_; }
  const std::optional<BlockNorm>& inner() const { return inner_; }
  const std::vector<Vec>& grid() const { return grid_; }
  // Relative amount by which the grid supremum may undershoot ||x||_E (kind A).
  double defect() const { return defect_; }

  Vec apply(std::span<const double> x) const {
    if (x.size() != input_dim_) throw DimensionError("Representation: expected " + std::to_string(input_dim_) +
                                                     " coordinates, got " + std::to_string(x.size()));
    switch (kind_) {
      case RepresentationKind::A: {
        Vec out(grid_.size(), 0.0);
        for (std::size_t g = 0; g < grid_.size(); ++g)
          for (std::size_t j = 0; j < input_dim_; ++j) out[g] += grid_[g][j] * x[j];
        return out;
      }
      case RepresentationKind::B:
        return Vec{(*inner_)(x)};
      case RepresentationKind::C:
        return Vec(x.begin(), x.end());
      case RepresentationKind::D:
      case RepresentationKind::E: {
        Vec out(measure_.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*inner_)(x.subspan(i * block_dim_, block_dim_));
        return out;
      }
    }
    return {};
  }

  // Quasi-norm of the element: norm(X, phi x).
  double element_norm(std::span<const double> x) const { return norm(space_, apply(x), measure_); }

  // Diagonal d with element_norm(x)^2 == sum d_j x_j^2, when that holds.
  std::optional<Vec> quadratic_form() const {
    auto is_l2 = [](const SpaceDescriptor& s) {
      auto p = lp_exponent(s);
      return p && *p == 2.0;
    };
    switch (kind_) {
      case RepresentationKind::A:
        return std::nullopt;
      case RepresentationKind::B:
        if (inner_->p && *inner_->p == 2.0) return Vec(input_dim_, 1.0);
        return std::nullopt;
      case RepresentationKind::C:
        if (is_l2(space_)) return Vec(measure_.weights().begin(), measure_.weights().end());
        return std::nullopt;
      case RepresentationKind::D:
      case RepresentationKind::E: {
        if (!is_l2(space_) || !inner_->p || *inner_->p != 2.0) return std::nullopt;
        Vec d(input_dim_);
        for (std::size_t j = 0; j < input_dim_; ++j) d[j] = measure_[j / block_dim_];
        return d;
      }
    }
    return std::nullopt;
  }

  std::string describe() const {
    std::string s = std::string("kind ") + to_string(kind_) + " into " + space_.name();
    if (inner_) s += " with E = " + inner_->name;
    return s;
  }

  // -- factories ---------------------------------------------------------

  // (A) Finite grid of norm-one functionals standing in for the dual ball.
  static Representation dual_grid(std::size_t dim, std::vector<Vec> functionals, double defect) {
    if (functionals.empty()) throw InvalidArgument("Representation A: empty dual grid");
    for (const auto& f : functionals)
      if (f.size() != dim) throw DimensionError("Representation A: functional of wrong length");
    if (!(defect >= 0.0 && defect < 1.0)) throw InvalidArgument("Representation A: defect must be in [0, 1)");
    Representation r(RepresentationKind::A, dim, SpaceDescriptor::lp(kInf),
                     DiscreteMeasure::counting(functionals.size()));
    r.grid_ = std::move(functionals);
    r.defect_ = defect;
    return r;
  }

  // (B) phi x = ||x||_E on a Dirac atom.
  static Representation dirac(std::size_t dim, BlockNorm e) {
    Representation r(RepresentationKind::B, dim, SpaceDescriptor::lp(1.0), DiscreteMeasure::counting(1));
    r.inner_ = std::move(e);
    r.block_dim_ = dim;
    r.check_homogeneous();
    return r;
  }

  // (C) The lattice itself.
  static Representation identity(SpaceDescriptor x, DiscreteMeasure mu) {
    const std::size_t n = mu.size();
    return Representation(RepresentationKind::C, n, std::move(x), std::move(mu));
  }

  // (D) L_r(mu, E).
  static Representation lr_valued(double r, DiscreteMeasure mu, std::size_t block_dim, BlockNorm e) {
    Representation rep = x_valued(SpaceDescriptor::lp(r), std::move(mu), block_dim, std::move(e));
    rep.kind_ = RepresentationKind::D;
    return rep;
  }

  // (E) X(mu, E), blocks laid out atom by atom.
  static Representation x_valued(SpaceDescriptor x, DiscreteMeasure mu, std::size_t block_dim, BlockNorm e) {
    if (block_dim == 0) throw InvalidArgument("Representation E: block dimension must be >= 1");
    const std::size_t n = mu.size();
    Representation r(RepresentationKind::E, n * block_dim, std::move(x), std::move(mu));
    r.inner_ = std::move(e);
    r.block_dim_ = block_dim;
    r.check_homogeneous();
    return r;
  }

 private:
  Representation(RepresentationKind k, std::size_t dim, SpaceDescriptor x, DiscreteMeasure mu)
      : kind_(k), input_dim_(dim), space_(std::move(x)), measure_(std::move(mu)) {}

  void check_homogeneous() const {
    Rng rng(0x5eed);
    for (int k = 0; k < 8; ++k) {
      const Vec x = random_signed(rng, input_dim_);
      const double lambda = k % 2 == 0 ? 0.5 : 3.0;
      Vec y = x;
      for (auto& v : y) v *= lambda;
      const Vec a = apply(x), b = apply(y);
      for (std::size_t i = 0; i < a.size(); ++i)
        if (std::fabs(b[i] - lambda * a[i]) > 1e-9 * (1.0 + std::fabs(lambda * a[i])))
          throw InvalidArgument("Representation: map is not positively homogeneous");
    }
  }

  RepresentationKind kind_;
  std::size_t input_dim_;
  std::size_t block_dim_ = 1;
  SpaceDescriptor space_;
  DiscreteMeasure measure_;
  std::optional<BlockNorm> inner_;
  std::vector<Vec> grid_;
  double defect_ = 0.0;
};

// Parameters for make_representation; only the fields of the chosen kind are
// read.
struct RepresentationParams {
  RepresentationKind kind = RepresentationKind::C;
  std::size_t dim = 1;  // A, B: dimension of E
  std::optional<SpaceDescriptor> space;
  std::optional<DiscreteMeasure> measure;
  std::optional<BlockNorm> inner;
  std::size_t block_dim = 1;
  double r = 1.0;  // D
  std::vector<Vec> grid;
  double defect = 0.0;
};

inline Representation make_representation(const RepresentationParams& p) {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw InvalidArgument(std::string("make_representation: missing ") + what);
  };
  switch (p.kind) {
    case RepresentationKind::A:
      return Representation::dual_grid(p.dim, p.grid, p.defect);
    case RepresentationKind::B:
      need(p.inner.has_value(), "inner norm");
      return Representation::dirac(p.dim, *p.inner);
    case RepresentationKind::C:
      need(p.space && p.measure, "space/measure");
      return Representation::identity(*p.space, *p.measure);
    case RepresentationKind::D:
      need(p.measure && p.inner, "measure/inner norm");
      return Representation::lr_valued(p.r, *p.measure, p.block_dim, *p.inner);
    case RepresentationKind::E:
      need(p.space && p.measure && p.inner, "space/measure/inner norm");
      return Representation::x_valued(*p.space, *p.measure, p.block_dim, *p.inner);
  }
  throw InvalidArgument("make_representation: unknown kind");
}

// Unit functionals at m equally spaced angles on the Euclidean circle; the
// grid supremum undershoots the l_2 norm by at most 1 - cos(pi/m).
inline Representation euclidean_circle_grid(std::size_t m) {
  if (m < 3) throw InvalidArgument("euclidean_circle_grid: need at least 3 directions");
  std::vector<Vec> g;
  const double pi = std::acos(-1.0);
  for (std::size_t k = 0; k < m; ++k) {
    const double a = 2.0 * pi * static_cast<double>(k) / static_cast<double>(m);
    g.push_back({std::cos(a), std::sin(a)});
  }
  return Representation::dual_grid(2, std::move(g), 1.0 - std::cos(pi / static_cast<double>(m)));
}

// X(mu, E) with ||x|| = norm(X, per-atom inner norms).
struct VectorValuedSpace {
  SpaceDescriptor outer;
  DiscreteMeasure measure;
  std::size_t block_dim;
  BlockNorm inner;

  Representation representation() const { return Representation::x_valued(outer, measure, block_dim, inner); }

  double norm(std::span<const double> x) const {
    if (x.size() != measure.size() * block_dim) throw DimensionError("VectorValuedSpace: wrong element size");
    Vec atoms(measure.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) atoms[i] = inner(x.subspan(i * block_dim, block_dim));
    return kothe::norm(outer, atoms, measure);
  }
};

}  // namespace kothe
