#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kothe/constants.hpp"
#include "kothe/measure.hpp"

namespace kothe {

struct SolverConfig {
  double tolerance = 1e-6;
  std::uint64_t seed = 0;
  std::size_t max_rounds = 80;           // cutting-plane rounds
  std::size_t master_iterations = 4000;  // ascent steps of the weight master problem
  SearchBudget search{16, 300, 0};       // adversarial inner searches (seed derived from `seed`)
  ConstantBudget constants{};            // used when a constant has to be estimated
  // Overrides for M_(r)(Y) and M^(r)(X); otherwise registered or estimated.
  std::optional<double> codomain_concavity;
  std::optional<double> domain_convexity;
  // Direct convex route (default) or the s = t/2 rescaling through the
  // minimax engine.
  enum class Route { direct, scaled } route = Route::direct;
};

// Source of a constant used in a bound.
struct ConstantUse {
  double value = 1.0;
  bool registered = true;  // false: multi-start estimate (lower bound)
};

struct WeightCertificate {
  Vec omega2;                 // over nu; absent (empty) for domain-weight certificates
  std::optional<Vec> omega1;  // over mu; absent for Dirac-domain reductions
  double r = 1.0;
  double constant = 1.0;  // C

  // sup_{||y||_{L_r(nu)} <= 1} ||omega2^(1/r) y||_Y and its limit C * M_(r)(Y).
  double codomain_bound = 0.0;
  bool codomain_bound_exact = true;
  double codomain_limit = 0.0;
  // sup_{||x||_X <= 1} ||omega1^(1/r) x||_{L_r(mu)} and its limit.
  std::optional<double> domain_bound;
  bool domain_bound_exact = true;
  double domain_limit = 0.0;

  ConstantUse codomain_concavity;  // M_(r)(Y)
  ConstantUse domain_convexity;    // M^(r)(X)

  // Worst relative domination violation found, max(0, sup D/R - 1).
  double residual = 0.0;
  bool residual_exact = false;

  bool feasible = true;
  std::string status = "feasible";
  std::string note;
  std::string route = "direct";
  bool uses_orlicz_bisection = false;

  // Witness tuple when infeasible: its vector-valued ratio exceeds C.
  std::vector<Vec> violating_tuple;
  double violating_ratio = 0.0;

  std::size_t iterations = 0;
  std::size_t witnesses = 0;
  double gap = 0.0;
  std::uint64_t seed = 0;
};

struct PietschCertificate {
  Vec lambda;
  double constant = 0.0;  // pi_r used
  double r = 1.0;
  double residual = 0.0;  // max over checked x of ||Tx||^r - pi^r sum lambda_j |x_j|^r, relative to pi^r
  double simplex_error = 0.0;
  bool feasible = true;
  std::string status = "feasible";
  std::vector<Vec> witnesses;
  Vec violating_x;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
};

struct FactorizationResult {
  enum class Side { range, domain } side = Side::range;
  Vec multiplier;         // g (range) or f (domain)
  Eigen::MatrixXd r_matrix;  // R
  double multiplier_norm = 0.0;
  double r_norm = 0.0;
  double norm_product = 0.0;
  double bound = 0.0;  // diagram bound the product must respect
  double composition_residual = 0.0;
  bool r_norm_exact = false;
};

struct MinimaxCertificate {
  Vec phi1, phi2;  // positive functionals (plain coefficient vectors)
  double margin_k1 = 0.0;      // min over retained and searched z of ||z|| - <phi, |z|>, relative
  double margin_k2 = 0.0;
  double worst_violation = 0.0;  // max over checked pairs of |u| / bound - 1
  bool converged = true;
  std::string status = "converged";
  std::size_t iterations = 0;
  std::size_t cuts = 0;
  std::uint64_t seed = 0;
};

struct VerificationReport {
  bool domination_passed = true;
  double domination_residual = 0.0;
  bool domination_exact = false;
  bool bounds_passed = true;
  double codomain_bound = 0.0;
  double codomain_limit = 0.0;
  std::optional<double> domain_bound;
  double domain_limit = 0.0;
  bool reverse_passed = true;
  double reverse_worst_ratio = 0.0;
  double reverse_limit = 0.0;
  std::size_t samples = 0;

  bool passed() const { return domination_passed && bounds_passed && reverse_passed; }
};

}  // namespace kothe
