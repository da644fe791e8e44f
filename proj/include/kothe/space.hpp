#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include "kothe/error.hpp"
#include "kothe/measure.hpp"

namespace kothe {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Hoelder conjugate exponent, 1/p + 1/p' = 1, with 1' = inf and inf' = 1.
inline double conjugate(double p) {
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

// Young functions admitted for Orlicz spaces.
class YoungFunction {
 public:
  enum class Kind { power, power_log, custom };

  // phi(s) = s^p
  static YoungFunction power(double p) {
    check_exponent(p);
    return YoungFunction(Kind::power, p, {}, "power");
  }
  // phi(s) = s^p log(1 + s)
  static YoungFunction power_log(double p) {
    check_exponent(p);
    return YoungFunction(Kind::power_log, p, {}, "power_log");
  }
  // Caller guarantees phi nondecreasing, convex, phi(0) = 0, phi -> inf.
  static YoungFunction custom(std::function<double(double)> phi, std::string name) {
    if (!phi) throw InvalidArgument("YoungFunction: empty callable");
    return YoungFunction(Kind::custom, 0.0, std::move(phi), std::move(name));
  }

  Kind kind() const { return kind_; }
  double p() const { return p_; }
  const std::string& name() const { return name_; }

  double operator()(double s) const {
    if (s <= 0.0) return 0.0;
    if (std::isinf(s)) return kInf;
    switch (kind_) {
      case Kind::power:
        return std::pow(s, p_);
      case Kind::power_log:
        return std::pow(s, p_) * std::log1p(s);
      case Kind::custom:
        return fn_(s);
    }
    return 0.0;
  }

  // (II)-exponent of the Luxemburg functional: 1 for convex phi.
  std::optional<double> convexity_exponent() const {
    switch (kind_) {
      case Kind::power:
        return std::min(p_, 1.0);
      case Kind::power_log:
        return p_ >= 1.0 ? std::optional<double>(1.0) : std::nullopt;
      case Kind::custom:
        return 1.0;
    }
    return std::nullopt;
  }

  friend bool operator==(const YoungFunction& a, const YoungFunction& b) {
    if (a.kind_ != b.kind_) return false;
    if (a.kind_ == Kind::custom) return a.name_ == b.name_;
    return a.p_ == b.p_;
  }

 private:
  YoungFunction(Kind k, double p, std::function<double(double)> fn, std::string name)
      : kind_(k), p_(p), fn_(std::move(fn)), name_(std::move(name)) {}

  static void check_exponent(double p) {
    if (!(p > 0.0) || !std::isfinite(p)) throw InvalidArgument("YoungFunction: exponent must be in (0, inf)");
  }

  Kind kind_;
  double p_;
  std::function<double(double)> fn_;
  std::string name_;
};

class SpaceDescriptor;

namespace space {

struct Lp {
  double p;
};

// Iterated norm over a product grid: inner exponent p2 over the second
// factor, outer exponent p1 over the first.
struct MixedNorm {
  double p1, p2;
  DiscreteMeasure mu1, mu2;
};

struct Lorentz {
  double p, q;
};

// Luxemburg norm of phi(s^root). root = 1 is the plain Orlicz space; the
// r-th power of L_phi is stored as root = 1/r.
struct Orlicz {
  YoungFunction phi;
  double root = 1.0;
};

struct Power {
  std::shared_ptr<const SpaceDescriptor> base;
  double r;
};

struct Dual {
  std::shared_ptr<const SpaceDescriptor> base;
};

}  // namespace space

// Tagged description of a quasi Koethe function space norm.
class SpaceDescriptor {
 public:
  using Node = std::variant<space::Lp, space::MixedNorm, space::Lorentz, space::Orlicz, space::Power,
                            space::Dual>;

  static SpaceDescriptor lp(double p) {
    check_exponent(p, true, "Lp: p");
    return SpaceDescriptor(space::Lp{p});
  }
  static SpaceDescriptor mixed(double p1, double p2, DiscreteMeasure mu1, DiscreteMeasure mu2) {
    check_exponent(p1, true, "MixedNorm: p1");
    check_exponent(p2, true, "MixedNorm: p2");
    return SpaceDescriptor(space::MixedNorm{p1, p2, std::move(mu1), std::move(mu2)});
  }
  static SpaceDescriptor lorentz(double p, double q) {
    check_exponent(p, false, "Lorentz: p");
    check_exponent(q, true, "Lorentz: q");
    return SpaceDescriptor(space::Lorentz{p, q});
  }
  static SpaceDescriptor orlicz(YoungFunction phi, double root = 1.0) {
    check_exponent(root, false, "Orlicz: root");
    return SpaceDescriptor(space::Orlicz{std::move(phi), root});
  }
  // Unsimplified power node; prefer power_space().
  static SpaceDescriptor power(SpaceDescriptor base, double r) {
    check_exponent(r, false, "Power: r");
    return SpaceDescriptor(space::Power{std::make_shared<const SpaceDescriptor>(std::move(base)), r});
  }
  // Unresolved dual node; prefer dual_space().
  static SpaceDescriptor dual(SpaceDescriptor base) {
    return SpaceDescriptor(space::Dual{std::make_shared<const SpaceDescriptor>(std::move(base))});
  }

  const Node& node() const { return node_; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(&node_);
  }

  std::string name() const;

 private:
  explicit SpaceDescriptor(Node n) : node_(std::move(n)) {}

  static void check_exponent(double p, bool allow_inf, const char* what) {
    const bool ok = p > 0.0 && (allow_inf || std::isfinite(p)) && !std::isnan(p);
    if (!ok) throw InvalidArgument(std::string(what) + " must be in (0, " + (allow_inf ? "inf]" : "inf)"));
  }

  Node node_;
};

namespace detail {
inline std::string fmt_exp(double p) {
  if (std::isinf(p)) return "inf";
  std::ostringstream os;
  os.precision(6);
  os << p;
  return os.str();
}
}  // namespace detail

inline std::string SpaceDescriptor::name() const {
  using detail::fmt_exp;
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, space::Lp>) {
          return "L_" + fmt_exp(n.p);
        } else if constexpr (std::is_same_v<T, space::MixedNorm>) {
          return "L_(" + fmt_exp(n.p1) + "," + fmt_exp(n.p2) + ")";
        } else if constexpr (std::is_same_v<T, space::Lorentz>) {
          return "L_" + fmt_exp(n.p) + "," + fmt_exp(n.q);
        } else if constexpr (std::is_same_v<T, space::Orlicz>) {
          std::string s = "Orlicz[" + n.phi.name();
          if (n.phi.kind() != YoungFunction::Kind::custom) s += "," + fmt_exp(n.phi.p());
          if (n.root != 1.0) s += ";root=" + fmt_exp(n.root);
          return s + "]";
        } else if constexpr (std::is_same_v<T, space::Power>) {
          return "(" + n.base->name() + ")^" + fmt_exp(n.r);
        } else {
          return "(" + n.base->name() + ")^x";
        }
      },
      node_);
}

// Closed-form Koethe dual, if registered: L_p <-> L_p' for p >= 1 and mixed
// norms with both exponents >= 1.
inline std::optional<SpaceDescriptor> closed_form_dual(const SpaceDescriptor& x);

// r-th power X^r with the registered simplifications applied.
inline SpaceDescriptor power_space(const SpaceDescriptor& x, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("power_space: r must be in (0, inf)");
  if (r == 1.0) return x;
  if (auto lp = x.as<space::Lp>()) return SpaceDescriptor::lp(std::isinf(lp->p) ? kInf : lp->p / r);
  if (auto m = x.as<space::MixedNorm>()) {
    auto div = [r](double p) { return std::isinf(p) ? kInf : p / r; };
    return SpaceDescriptor::mixed(div(m->p1), div(m->p2), m->mu1, m->mu2);
  }
  if (auto l = x.as<space::Lorentz>())
    return SpaceDescriptor::lorentz(l->p / r, std::isinf(l->q) ? kInf : l->q / r);
  if (auto o = x.as<space::Orlicz>()) return SpaceDescriptor::orlicz(o->phi, o->root / r);
  if (auto pw = x.as<space::Power>()) return power_space(*pw->base, pw->r * r);
  if (auto d = x.as<space::Dual>()) {
    if (auto resolved = closed_form_dual(*d->base)) return power_space(*resolved, r);
  }
  return SpaceDescriptor::power(x, r);
}

inline std::optional<SpaceDescriptor> closed_form_dual(const SpaceDescriptor& x) {
  if (auto lp = x.as<space::Lp>()) {
    if (lp->p >= 1.0) return SpaceDescriptor::lp(conjugate(lp->p));
    return std::nullopt;
  }
  if (auto m = x.as<space::MixedNorm>()) {
    if (m->p1 >= 1.0 && m->p2 >= 1.0)
      return SpaceDescriptor::mixed(conjugate(m->p1), conjugate(m->p2), m->mu1, m->mu2);
    return std::nullopt;
  }
  if (auto l = x.as<space::Lorentz>()) {
    if (l->p == l->q && l->p >= 1.0) return SpaceDescriptor::lp(conjugate(l->p));
    return std::nullopt;
  }
  if (auto o = x.as<space::Orlicz>()) {
    if (o->phi.kind() == YoungFunction::Kind::power) {
      const double p = o->phi.p() * o->root;
      if (p >= 1.0) return SpaceDescriptor::lp(conjugate(p));
    }
    return std::nullopt;
  }
  if (auto pw = x.as<space::Power>()) {
    const SpaceDescriptor simplified = power_space(*pw->base, pw->r);
    if (simplified.as<space::Power>()) return std::nullopt;
    return closed_form_dual(simplified);
  }
  if (auto d = x.as<space::Dual>()) {
    // X^xx = X for the registered pairs.
    if (auto inner = closed_form_dual(*d->base)) return closed_form_dual(*inner);
    return std::nullopt;
  }
  return std::nullopt;
}

// Koethe dual X^x; throws unless a closed form is registered.
inline SpaceDescriptor dual_space(const SpaceDescriptor& x) {
  if (auto d = closed_form_dual(x)) return *d;
  throw InvalidArgument("dual_space: no closed-form Koethe dual registered for " + x.name());
}

// If the space is (isometrically) an L_p space, its exponent.
inline std::optional<double> lp_exponent(const SpaceDescriptor& x) {
  if (auto lp = x.as<space::Lp>()) return lp->p;
  if (auto l = x.as<space::Lorentz>()) {
    if (l->p == l->q) return l->p;
    return std::nullopt;
  }
  if (auto o = x.as<space::Orlicz>()) {
    if (o->phi.kind() == YoungFunction::Kind::power) return o->phi.p() * o->root;
    return std::nullopt;
  }
  if (auto pw = x.as<space::Power>()) {
    auto p = lp_exponent(*pw->base);
    if (!p) return std::nullopt;
    return std::isinf(*p) ? kInf : *p / pw->r;
  }
  if (auto d = x.as<space::Dual>()) {
    if (auto resolved = closed_form_dual(*d->base)) return lp_exponent(*resolved);
  }
  return std::nullopt;
}

// Declared exponent t for which the quasi-triangle inequality (II) holds with
// constant 1; nullopt when none is declared.
inline std::optional<double> convexity_exponent(const SpaceDescriptor& x) {
  if (auto lp = x.as<space::Lp>()) return std::isinf(lp->p) ? 1.0 : lp->p;
  if (auto m = x.as<space::MixedNorm>()) {
    const double t = std::min(m->p1, m->p2);
    return std::isinf(t) ? 1.0 : t;
  }
  if (auto l = x.as<space::Lorentz>()) {
    if (l->q <= l->p) return l->q;
    return std::nullopt;
  }
  if (auto o = x.as<space::Orlicz>()) {
    auto t = o->phi.convexity_exponent();
    if (!t) return std::nullopt;
    return *t * o->root;
  }
  if (auto pw = x.as<space::Power>()) {
    auto t = convexity_exponent(*pw->base);
    if (!t) return std::nullopt;
    return *t / pw->r;
  }
  if (auto d = x.as<space::Dual>()) {
    if (closed_form_dual(*d->base)) return 1.0;
  }
  return std::nullopt;
}

// Registered exact value of the r-convexity constant M^(r)(X).
inline std::optional<double> registered_convexity(const SpaceDescriptor& x, double r) {
  if (auto p = lp_exponent(x)) {
    if (r <= *p) return 1.0;
    return std::nullopt;
  }
  if (auto m = x.as<space::MixedNorm>()) {
    if (r <= std::min(m->p1, m->p2)) return 1.0;
    return std::nullopt;
  }
  if (auto pw = x.as<space::Power>()) {
    // M^(r/t)(X^t) = M^(r)(X)^t
    auto base = registered_convexity(*pw->base, r * pw->r);
    if (!base) return std::nullopt;
    return std::pow(*base, pw->r);
  }
  if (auto d = x.as<space::Dual>()) {
    if (auto resolved = closed_form_dual(*d->base)) return registered_convexity(*resolved, r);
  }
  return std::nullopt;
}

// Registered exact value of the r-concavity constant M_(r)(X).
inline std::optional<double> registered_concavity(const SpaceDescriptor& x, double r) {
  if (auto p = lp_exponent(x)) {
    if (r >= *p) return 1.0;
    return std::nullopt;
  }
  if (auto m = x.as<space::MixedNorm>()) {
    if (r >= std::max(m->p1, m->p2)) return 1.0;
    return std::nullopt;
  }
  if (auto pw = x.as<space::Power>()) {
    auto base = registered_concavity(*pw->base, r * pw->r);
    if (!base) return std::nullopt;
    return std::pow(*base, pw->r);
  }
  if (auto d = x.as<space::Dual>()) {
    if (auto resolved = closed_form_dual(*d->base)) return registered_concavity(*resolved, r);
  }
  return std::nullopt;
}

}  // namespace kothe

namespace kothe {

namespace detail {
inline bool uniform_weights(const DiscreteMeasure& mu) {
  for (std::size_t i = 1; i < mu.size(); ++i)
    if (mu[i] != mu[0]) return false;
  return true;
}
}  // namespace detail

// Measure-aware registry: additionally knows the finite-dimensional values
// M^(r)(L_p) = n^(1/p - 1/r) for r > p and M_(r)(L_p) = n^(1/r - 1/p) for
// r < p on n atoms of equal weight.
inline std::optional<double> registered_convexity(const SpaceDescriptor& x, double r,
                                                  const DiscreteMeasure& mu) {
  if (auto c = registered_convexity(x, r)) return c;
  if (auto p = lp_exponent(x); p && detail::uniform_weights(mu) && r > *p && std::isfinite(*p))
    return std::pow(static_cast<double>(mu.size()), 1.0 / *p - 1.0 / r);
  return std::nullopt;
}

inline std::optional<double> registered_concavity(const SpaceDescriptor& x, double r,
                                                  const DiscreteMeasure& mu) {
  if (auto c = registered_concavity(x, r)) return c;
  if (auto p = lp_exponent(x); p && detail::uniform_weights(mu) && r < *p) {
    const double inv_p = std::isinf(*p) ? 0.0 : 1.0 / *p;
    return std::pow(static_cast<double>(mu.size()), 1.0 / r - inv_p);
  }
  return std::nullopt;
}

}  // namespace kothe

namespace kothe {

// True when evaluating the space runs the Luxemburg bisection.
inline bool uses_orlicz(const SpaceDescriptor& x) {
  if (x.as<space::Orlicz>()) return true;
  if (auto pw = x.as<space::Power>()) return uses_orlicz(*pw->base);
  if (auto d = x.as<space::Dual>()) return uses_orlicz(*d->base);
  return false;
}

}  // namespace kothe
