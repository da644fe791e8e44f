#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "kothe/error.hpp"

namespace kothe {

using Vec = std::vector<double>;

// Finite measure space: n atoms with strictly positive weights. Copies share
// the (immutable) weight storage.
class DiscreteMeasure {
 public:
  explicit DiscreteMeasure(Vec weights) {
    if (weights.empty()) throw InvalidArgument("DiscreteMeasure: at least one atom required");
    for (double w : weights) {
      if (!(w > 0.0) || !std::isfinite(w))
        throw InvalidArgument("DiscreteMeasure: atom weights must be finite and > 0");
    }
    weights_ = std::make_shared<const Vec>(std::move(weights));
  }

  // Counting measure on n atoms.
  static DiscreteMeasure counting(std::size_t n) { return DiscreteMeasure(Vec(n, 1.0)); }

  std::size_t size() const { return weights_->size(); }
  double operator[](std::size_t i) const { return (*weights_)[i]; }
  std::span<const double> weights() const { return *weights_; }
  double total() const { return std::accumulate(weights_->begin(), weights_->end(), 0.0); }

  friend bool operator==(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    return a.weights_ == b.weights_ || *a.weights_ == *b.weights_;
  }

 private:
  std::shared_ptr<const Vec> weights_;
};

// Product measure mu1 (x) mu2, atoms ordered row-major: index i*n2 + j.
inline DiscreteMeasure product_measure(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2) {
  Vec w;
  w.reserve(mu1.size() * mu2.size());
  for (std::size_t i = 0; i < mu1.size(); ++i)
    for (std::size_t j = 0; j < mu2.size(); ++j) w.push_back(mu1[i] * mu2[j]);
  return DiscreteMeasure(std::move(w));
}

// Real function on the atoms of a measure.
class LatticeFunction {
 public:
  LatticeFunction(DiscreteMeasure measure, Vec values)
      : measure_(std::move(measure)), values_(std::move(values)) {
    if (values_.size() != measure_.size())
      throw DimensionError("LatticeFunction: " + std::to_string(values_.size()) + " values for " +
                           std::to_string(measure_.size()) + " atoms");
  }

  const DiscreteMeasure& measure() const { return measure_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  LatticeFunction abs() const {
    Vec v(values_);
    for (auto& e : v) e = std::fabs(e);
    return {measure_, std::move(v)};
  }

  // |x|^alpha with 0^alpha = 0.
  LatticeFunction pow_abs(double alpha) const {
    if (!(alpha > 0.0)) throw InvalidArgument("pow_abs: exponent must be > 0");
    Vec v(values_);
    for (auto& e : v) e = e == 0.0 ? 0.0 : std::pow(std::fabs(e), alpha);
    return {measure_, std::move(v)};
  }

  LatticeFunction operator*(const LatticeFunction& o) const {
    check_same(o);
    Vec v(values_);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= o.values_[i];
    return {measure_, std::move(v)};
  }

  LatticeFunction scaled(double c) const {
    Vec v(values_);
    for (auto& e : v) e *= c;
    return {measure_, std::move(v)};
  }

  // Integral pairing <x, y>_mu.
  double pairing(const LatticeFunction& o) const {
    check_same(o);
    double s = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) s += measure_[i] * values_[i] * o.values_[i];
    return s;
  }

 private:
  void check_same(const LatticeFunction& o) const {
    if (o.size() != size()) throw DimensionError("LatticeFunction: size mismatch");
  }

  DiscreteMeasure measure_;
  Vec values_;
};

// Nonincreasing step function on [0, total): levels[k] on
// [breakpoints[k], breakpoints[k+1]).
struct StepFunction {
  Vec breakpoints;  // size levels.size() + 1, starts at 0
  Vec levels;

  double length(std::size_t k) const { return breakpoints[k + 1] - breakpoints[k]; }
  double integral() const {
    double s = 0.0;
    for (std::size_t k = 0; k < levels.size(); ++k) s += levels[k] * length(k);
    return s;
  }
};

// Decreasing rearrangement of |x| w.r.t. the atom weights. Equal levels are
// merged, so the output does not depend on the order of the atoms.
inline StepFunction decreasing_rearrangement(std::span<const double> values,
                                             std::span<const double> weights) {
  if (values.size() != weights.size()) throw DimensionError("rearrangement: size mismatch");
  std::vector<std::pair<double, double>> atoms;  // (|x_i|, mu_i)
  atoms.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) atoms.emplace_back(std::fabs(values[i]), weights[i]);
  std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  StepFunction f;
  f.breakpoints.push_back(0.0);
  // Accumulate lengths per level and sum them in a fixed (sorted-by-weight)
  // order so that merged levels are bit-identical under atom permutations.
  std::size_t k = 0;
  double start = 0.0;
  while (k < atoms.size()) {
    std::size_t e = k;
    Vec lens;
    while (e < atoms.size() && atoms[e].first == atoms[k].first) lens.push_back(atoms[e++].second);
    std::sort(lens.begin(), lens.end());
    double len = 0.0;
    for (double l : lens) len += l;
    start += len;
    f.levels.push_back(atoms[k].first);
    f.breakpoints.push_back(start);
    k = e;
  }
  return f;
}

inline StepFunction decreasing_rearrangement(const LatticeFunction& x) {
  return decreasing_rearrangement(x.values(), x.measure().weights());
}

}  // namespace kothe
