#pragma once

#include <cmath>
#include <vector>

#include "kothe/certificates.hpp"
#include "kothe/operator.hpp"
#include "kothe/weights.hpp"

namespace kothe {

struct VerifyOptions {
  double tolerance = 1e-6;
  std::size_t samples = 100;  // random tuples for the reverse check
  std::size_t max_tuple = 4;
  std::uint64_t seed = 0;
  SearchBudget search{16, 300, 0};
};

namespace detail {

inline Vec inverse_weight(const Vec& omega) {
  Vec u(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) u[i] = omega[i] > 0.0 ? 1.0 / omega[i] : kInf;
  return u;
}

inline std::vector<Vec> random_tuple(Rng& rng, std::size_t dim, std::size_t max_size) {
  const std::size_t m = 1 + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(max_size));
  std::vector<Vec> t;
  for (std::size_t k = 0; k < std::min(m, max_size); ++k) t.push_back(random_signed(rng, dim));
  return t;
}

}  // namespace detail

// Re-derives everything from the raw weights: (a) the domination on random
// and adversarial inputs, (b) both norm bounds, (c) the vector-valued
// inequality on random tuples with constant C M_(r)(Y) M^(r)(X).
// Certificates without a codomain weight are checked as domain weights:
// ||T x||_F^r <= int |phi x|^r omega1 dmu, the bound against C, and the
// r-concavity inequality of T with constant C.
inline VerificationReport verify_weight_certificate(const WeightCertificate& cert, const OperatorSpec& op,
                                                    const VerifyOptions& opt = {}) {
  VerificationReport rep;
  const double r = cert.r;
  const double tol = opt.tolerance;
  SearchBudget b = opt.search;
  b.seed = split_seed(opt.seed, 0x7E57);
  Rng rng(split_seed(opt.seed, 0x5A));
  std::vector<Vec> seeds = detail::unit_vectors(op.in_dim());
  for (int k = 0; k < 32; ++k) seeds.push_back(random_signed(rng, op.in_dim()));

  const bool domain_only = cert.omega2.empty();
  if (!domain_only) {
    if (cert.omega2.size() != op.codomain().measure().size()) throw DimensionError("verify: omega2 has wrong length");
    Domination d{&op, r, detail::inverse_weight(cert.omega2), cert.omega1};
    const SupValue s = domination_sup(d, b, seeds);
    rep.domination_residual = std::max(0.0, s.value - 1.0);
    rep.domination_exact = s.exact;

    rep.codomain_bound =
        multiplication_norm(op.codomain().space(), op.codomain().measure(), cert.omega2, r, opt.search).value;
    rep.codomain_limit = cert.constant * cert.codomain_concavity.value;
    rep.domain_limit = cert.domain_convexity.value;
    double domain = 1.0;
    if (cert.omega1) {
      domain = domain_weight_bound(op.domain().space(), op.domain().measure(), *cert.omega1, r, opt.search).value;
      rep.domain_bound = domain;
    }
    rep.bounds_passed = rep.codomain_bound <= rep.codomain_limit * (1.0 + tol) &&
                        (!cert.omega1 || domain <= rep.domain_limit * (1.0 + tol));
    rep.reverse_limit = rep.codomain_limit * rep.domain_limit;
  } else {
    if (!cert.omega1) throw InvalidArgument("verify: certificate carries no weight");
    const auto& mu = op.domain().measure();
    auto ratio = [&](std::span<const double> x) {
      const double t = op.codomain().element_norm(op.apply(x));
      if (t == 0.0) return 0.0;
      const Vec src = op.source(x);
      double q = 0.0;
      for (std::size_t j = 0; j < src.size(); ++j)
        if (src[j] != 0.0) q += mu[j] * (*cert.omega1)[j] * std::pow(std::fabs(src[j]), r);
      return q == 0.0 ? kInf : std::pow(t, r) / q;
    };
    for (auto& v : detail::sign_vertices(op.in_dim(), 256)) seeds.push_back(std::move(v));
    const SearchResult s = maximize_ratio(op.in_dim(), false, ratio, b, seeds);
    rep.domination_residual = std::max(0.0, s.value - 1.0);
    rep.domain_bound = domain_weight_bound(op.domain().space(), mu, *cert.omega1, r, opt.search).value;
    rep.domain_limit = cert.constant;
    rep.bounds_passed = *rep.domain_bound <= rep.domain_limit * (1.0 + tol);
    rep.reverse_limit = cert.constant;
  }
  rep.domination_passed = rep.domination_residual <= tol;

  for (std::size_t k = 0; k < opt.samples; ++k) {
    const auto tuple = detail::random_tuple(rng, op.in_dim(), opt.max_tuple);
    const double v = domain_only ? operator_concavity_ratio(op, tuple, r) : vv_ratio(op, tuple, r);
    rep.reverse_worst_ratio = std::max(rep.reverse_worst_ratio, v);
  }
  rep.samples = opt.samples;
  rep.reverse_passed = rep.reverse_worst_ratio <= rep.reverse_limit * (1.0 + tol);
  return rep;
}

}  // namespace kothe
