#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "kothe/factorization.hpp"
#include "kothe/oracles.hpp"
#include "kothe/verify.hpp"
#include "kothe/weights.hpp"

using namespace kothe;
using kothe::testing::mu;

namespace {

void expect_factorizes(const FactorizationResult& f) {
  EXPECT_LE(f.composition_residual, 1e-9);
  EXPECT_LE(f.norm_product, f.bound * (1.0 + 1e-6));
}

}  // namespace

TEST(RangeFactorization, WorkedExample) {
  const auto op = kothe::testing::r_to_l1();
  const auto cert = solve_weight_pair(op, 2.0, 2.0);
  const auto f = build_factorization_range(cert, op);
  ASSERT_EQ(f.multiplier.size(), 2u);
  EXPECT_NEAR(f.multiplier[0], std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(f.multiplier[1], std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(f.r_norm, 1.0, 1e-6);
  EXPECT_NEAR(f.multiplier_norm, 2.0, 1e-6);
  EXPECT_NEAR(f.bound, 2.0, 1e-9);
  expect_factorizes(f);
}

TEST(RangeFactorization, ZeroOperator) {
  const auto op = kothe::testing::euclidean_into(Eigen::MatrixXd::Zero(2, 2), 1.0, DiscreteMeasure::counting(2));
  const auto cert = solve_weight_pair(op, 2.0, 1.0);
  ASSERT_TRUE(cert.feasible);
  const auto f = build_factorization_range(cert, op);
  EXPECT_EQ(f.composition_residual, 0.0);
  EXPECT_EQ(f.r_norm, 0.0);
}

TEST(RangeFactorization, IdentityOnL2) {
  const auto m = mu({1, 2, 0.5});
  const auto op = kothe::testing::lattice(Eigen::MatrixXd::Identity(3, 3), SpaceDescriptor::lp(2), m,
                                          SpaceDescriptor::lp(2), m);
  const auto cert = solve_weight_pair(op, 2.0, 1.0);
  ASSERT_TRUE(cert.feasible);
  expect_factorizes(build_factorization_range(cert, op));
}

TEST(RangeFactorization, RandomEuclideanInstances) {
  Rng rng(50);
  for (int k = 0; k < 5; ++k) {
    const Eigen::MatrixXd t = kothe::testing::random_matrix(rng, 4, 3);
    const auto nu = mu(kothe::testing::random_weights(rng, 4));
    const auto op = kothe::testing::euclidean_into(t, 1.0, nu);
    const double c = oracle::hilbert_weight_oracle(t, 1.0, nu, 1e6).upper * 1.02;
    const auto cert = solve_weight_pair(op, 2.0, c);
    ASSERT_TRUE(cert.feasible);
    const auto f = build_factorization_range(cert, op);
    EXPECT_TRUE(f.r_norm_exact);
    expect_factorizes(f);
  }
}

TEST(RangeFactorization, NeedsCodomainWeight) {
  const auto m = mu({1, 1});
  const auto op = kothe::testing::lattice(Eigen::MatrixXd::Identity(2, 2), SpaceDescriptor::lp(2), m,
                                          SpaceDescriptor::lp(2), m);
  const auto cert = solve_weight_domain(op, 2.0, 1.0);
  EXPECT_THROW(build_factorization_range(cert, op), InvalidArgument);
}

TEST(DomainFactorization, IdentityOnL2) {
  const auto m = mu({1, 2, 0.5});
  const auto op = kothe::testing::lattice(Eigen::MatrixXd::Identity(3, 3), SpaceDescriptor::lp(2), m,
                                          SpaceDescriptor::lp(2), m);
  const auto cert = solve_weight_domain(op, 2.0, 1.0);
  const auto f = build_factorization_domain(cert, op);
  for (double v : f.multiplier) EXPECT_NEAR(v, 1.0, 1e-6);
  EXPECT_TRUE(f.r_norm_exact);
  expect_factorizes(f);
}

TEST(DomainFactorization, SumFunctional) {
  Eigen::MatrixXd t(1, 2);
  t << 1, 1;
  const auto op = kothe::testing::lattice(t, SpaceDescriptor::lp(kInf), DiscreteMeasure::counting(2),
                                          SpaceDescriptor::lp(1), DiscreteMeasure::counting(1));
  const auto cert = solve_weight_domain(op, 1.0, 2.0);
  const auto f = build_factorization_domain(cert, op);
  EXPECT_NEAR(f.multiplier[0], 1.0, 1e-6);
  EXPECT_NEAR(f.multiplier[1], 1.0, 1e-6);
  expect_factorizes(f);
}

TEST(DomainFactorization, RejectsWeightVanishingOnSupport) {
  const auto m = mu({1, 1});
  const auto op = kothe::testing::lattice(Eigen::MatrixXd::Identity(2, 2), SpaceDescriptor::lp(2), m,
                                          SpaceDescriptor::lp(2), m);
  auto cert = solve_weight_domain(op, 2.0, 1.0);
  (*cert.omega1)[1] = 0.0;
  EXPECT_THROW(build_factorization_domain(cert, op), IllPosedError);
}

TEST(Verify, WorkedExamplePasses) {
  const auto op = kothe::testing::r_to_l1();
  const auto cert = solve_weight_pair(op, 2.0, 2.0);
  const auto rep = verify_weight_certificate(cert, op);
  EXPECT_TRUE(rep.passed());
  EXPECT_TRUE(rep.domination_exact);
  EXPECT_LE(rep.domination_residual, 1e-6);
  // the reverse check: vector-valued ratios stay below C M_(r)(Y) M^(r)(X) = 2
  EXPECT_NEAR(rep.reverse_limit, 2.0, 1e-9);
  EXPECT_LE(rep.reverse_worst_ratio, 2.0 * (1.0 + 1e-6));
  EXPECT_EQ(rep.samples, 100u);
}

TEST(Verify, HalvedWeightFailsDomination) {
  const auto op = kothe::testing::r_to_l1();
  auto cert = solve_weight_pair(op, 2.0, 2.0);
  for (auto& w : cert.omega2) w *= 0.5;
  const auto rep = verify_weight_certificate(cert, op);
  EXPECT_FALSE(rep.passed());
  EXPECT_FALSE(rep.domination_passed);
  EXPECT_NEAR(rep.domination_residual, 1.0, 1e-6);
}

TEST(Verify, InflatedWeightFailsNormBound) {
  const auto op = kothe::testing::r_to_l1();
  auto cert = solve_weight_pair(op, 2.0, 2.0);
  for (auto& w : cert.omega2) w *= 2.0;
  const auto rep = verify_weight_certificate(cert, op);
  EXPECT_TRUE(rep.domination_passed);
  EXPECT_FALSE(rep.bounds_passed);
}

TEST(Verify, ReverseCheckOnRandomTuples) {
  Rng rng(51);
  const Eigen::MatrixXd t = kothe::testing::random_matrix(rng, 3, 3);
  const auto nu = DiscreteMeasure::counting(3);
  const auto op = kothe::testing::euclidean_into(t, 1.0, nu);
  const auto cert = solve_weight_pair(op, 2.0, oracle::hilbert_weight_oracle(t, 1.0, nu, 1e6).upper * 1.02);
  VerifyOptions o;
  o.samples = 100;
  o.seed = 7;
  const auto rep = verify_weight_certificate(cert, op, o);
  EXPECT_TRUE(rep.reverse_passed);
  EXPECT_LE(rep.reverse_worst_ratio, rep.reverse_limit * (1.0 + 1e-6));
  // independent replay of the reverse inequality
  Rng tr(52);
  for (int k = 0; k < 100; ++k) {
    std::vector<Vec> xs;
    for (int j = 0; j < 1 + k % 4; ++j) xs.push_back(random_signed(tr, 3));
    EXPECT_LE(vv_ratio(op, xs, 2.0), rep.reverse_limit * (1.0 + 1e-6));
  }
}

TEST(Verify, DomainCertificate) {
  Eigen::MatrixXd t(1, 2);
  t << 1, 1;
  const auto op = kothe::testing::lattice(t, SpaceDescriptor::lp(kInf), DiscreteMeasure::counting(2),
                                          SpaceDescriptor::lp(1), DiscreteMeasure::counting(1));
  auto cert = solve_weight_domain(op, 1.0, 2.0);
  EXPECT_TRUE(verify_weight_certificate(cert, op).passed());
  for (auto& w : *cert.omega1) w *= 0.5;
  EXPECT_FALSE(verify_weight_certificate(cert, op).passed());
}

TEST(Verify, WrongLengthRejected) {
  const auto op = kothe::testing::r_to_l1();
  auto cert = solve_weight_pair(op, 2.0, 2.0);
  cert.omega2.push_back(1.0);
  EXPECT_THROW(verify_weight_certificate(cert, op), DimensionError);
}
