#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "kothe/constants.hpp"
#include "kothe/duality.hpp"
#include "kothe/oracles.hpp"

using namespace kothe;
using kothe::testing::mu;

namespace {

TupleWitness tuple(std::vector<Vec> vs, double r, DiscreteMeasure m) { return {std::move(vs), r, std::move(m)}; }

ConstantBudget small_budget(std::uint64_t seed) {
  ConstantBudget b;
  b.tuple_sizes = {1, 2, 4};
  b.search = {12, 200, seed};
  return b;
}

}  // namespace

TEST(Ratios, ConvexityOfL1AtTwo) {
  const auto t = tuple({{1, 0}, {0, 1}}, 2.0, mu({1, 1}));
  EXPECT_NEAR(convexity_ratio(SpaceDescriptor::lp(1), t), std::sqrt(2.0), 1e-12);
}

TEST(Ratios, SingletonTupleIsOne) {
  const auto t = tuple({{0.3, -2, 1}}, 2.5, mu({1, 2, 3}));
  for (const auto& s : {SpaceDescriptor::lp(1), SpaceDescriptor::lorentz(3, 2), SpaceDescriptor::lp(0.5)}) {
    EXPECT_NEAR(convexity_ratio(s, t), 1.0, 1e-12);
    EXPECT_NEAR(concavity_ratio(s, t), 1.0, 1e-12);
  }
}

TEST(Ratios, LpConvexBelowItsExponent) {
  Rng rng(3);
  for (double p : {1.0, 2.0, 3.0}) {
    for (int k = 0; k < 50; ++k) {
      const double r = uniform(rng, 0.5, p);
      const auto m = mu(kothe::testing::random_weights(rng, 3));
      const auto t = tuple({random_signed(rng, 3), random_signed(rng, 3), random_signed(rng, 3)}, r, m);
      EXPECT_LE(convexity_ratio(SpaceDescriptor::lp(p), t), 1.0 + 1e-9);
    }
  }
}

TEST(Ratios, LrIsExactlyRConcave) {
  Rng rng(4);
  const auto m = mu({1, 0.5, 2});
  for (int k = 0; k < 30; ++k) {
    const auto t = tuple({random_signed(rng, 3), random_signed(rng, 3)}, 2.5, m);
    EXPECT_NEAR(concavity_ratio(SpaceDescriptor::lp(2.5), t), 1.0, 1e-9);
  }
}

TEST(Ratios, ConcavityOfLinfAtTwo) {
  const auto t = tuple({{1, 0}, {0, 1}}, 2.0, mu({1, 1}));
  EXPECT_NEAR(concavity_ratio(SpaceDescriptor::lp(kInf), t), std::sqrt(2.0), 1e-12);
}

TEST(Ratios, AllZeroTupleRejected) {
  const auto t = tuple({{0, 0}, {0, 0}}, 2.0, mu({1, 1}));
  EXPECT_THROW(convexity_ratio(SpaceDescriptor::lp(1), t), InvalidArgument);
}

TEST(Estimates, L2AtTwoIsExactlyOne) {
  const auto e = estimate_space_constant(SpaceDescriptor::lp(2), mu({1, 2}), 2.0, ConstantKind::convexity,
                                         small_budget(1));
  EXPECT_NEAR(e.value, 1.0, 1e-9);
  EXPECT_EQ(e.status, BoundStatus::exact);
}

TEST(Estimates, L1OnTwoAtomsMatchesExhaustiveOracle) {
  const auto m = mu({1, 1});
  const auto e = estimate_space_constant(SpaceDescriptor::lp(1), m, 2.0, ConstantKind::convexity, small_budget(2));
  EXPECT_GE(e.value, std::sqrt(2.0) - 1e-6);
  const auto o = oracle::exhaustive_tuple_search(SpaceDescriptor::lp(1), m, 2.0, true, 2, 21);
  EXPECT_NEAR(o.value, std::sqrt(2.0), 1e-9);
  EXPECT_LE(e.value, o.value + 1e-9);
  // the estimate is the ratio of its own witness
  EXPECT_DOUBLE_EQ(e.value, convexity_ratio(SpaceDescriptor::lp(1), e.witness));
}

TEST(Estimates, LorentzFiniteAndMonotoneInBudget) {
  const auto s = SpaceDescriptor::lorentz(3, 2);
  const auto m = DiscreteMeasure::counting(8);
  double previous = 0.0;
  for (std::size_t starts : {2u, 6u, 18u}) {
    ConstantBudget b;
    b.tuple_sizes = {1, 2, 4};
    b.search = {starts, 150, 9};
    const auto e = estimate_space_constant(s, m, 2.0, ConstantKind::convexity, b);
    EXPECT_TRUE(std::isfinite(e.value));
    EXPECT_GE(e.value, previous - 1e-12);
    previous = e.value;
  }
}

TEST(Estimates, ZeroBudgetGivesSingletonRatio) {
  ConstantBudget b;
  b.tuple_sizes = {};
  const auto e = estimate_space_constant(SpaceDescriptor::lp(1), mu({1, 1}), 2.0, ConstantKind::convexity, b);
  EXPECT_DOUBLE_EQ(e.value, 1.0);
}

TEST(Estimates, DeterministicGivenSeed) {
  const auto a = estimate_space_constant(SpaceDescriptor::lorentz(2, 3), mu({1, 2, 1}), 2.0, ConstantKind::concavity,
                                         small_budget(4));
  const auto b = estimate_space_constant(SpaceDescriptor::lorentz(2, 3), mu({1, 2, 1}), 2.0, ConstantKind::concavity,
                                         small_budget(4));
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.witness.vectors, b.witness.vectors);
}

TEST(OperatorConstants, WorkedExampleIsTwo) {
  const auto op = kothe::testing::r_to_l1();
  const auto e = estimate_operator_constant(op, 2.0, ConstantKind::convexity, small_budget(5));
  EXPECT_NEAR(e.value, 2.0, 1e-6);
}

TEST(OperatorConstants, ZeroOperator) {
  const auto op = kothe::testing::euclidean_into(Eigen::MatrixXd::Zero(2, 2), 1.0, mu({1, 1}));
  EXPECT_EQ(estimate_operator_constant(op, 2.0, ConstantKind::convexity, small_budget(6)).value, 0.0);
}

TEST(OperatorConstants, IdentityOnLr) {
  const auto m = mu({1, 2, 0.5});
  const auto op = kothe::testing::lattice(Eigen::MatrixXd::Identity(3, 3), SpaceDescriptor::lp(2), m,
                                          SpaceDescriptor::lp(2), m);
  EXPECT_NEAR(estimate_operator_constant(op, 2.0, ConstantKind::convexity, small_budget(7)).value, 1.0, 1e-6);
  EXPECT_NEAR(estimate_operator_constant(op, 2.0, ConstantKind::concavity, small_budget(7)).value, 1.0, 1e-6);
}

TEST(Transport, WorkedArithmetic) {
  const auto t = tuple({{1, 0}, {0, 1}}, 4.0, mu({1, 1}));
  const double before = convexity_ratio(SpaceDescriptor::lp(2), t);
  EXPECT_NEAR(before, std::pow(2.0, 0.25), 1e-12);
  const auto moved = lemma2_transport(t, 2.0);
  EXPECT_DOUBLE_EQ(moved.r, 2.0);
  EXPECT_NEAR(convexity_ratio(power_space(SpaceDescriptor::lp(2), 2.0), moved), std::sqrt(2.0), 1e-12);
}

TEST(Transport, UnitExponentIsIdentity) {
  const auto t = tuple({{1, -2}, {0.5, 1}}, 3.0, mu({1, 2}));
  const auto moved = lemma2_transport(t, 1.0);
  EXPECT_EQ(moved.r, 3.0);
  EXPECT_EQ(moved.vectors[0], (Vec{1, 2}));
  EXPECT_NEAR(convexity_ratio(SpaceDescriptor::lp(1), moved), convexity_ratio(SpaceDescriptor::lp(1), t), 1e-15);
}

TEST(Transport, RatiosRaisedToThePower) {
  Rng rng(21);
  const std::vector<SpaceDescriptor> spaces{SpaceDescriptor::lp(1), SpaceDescriptor::lp(3),
                                            SpaceDescriptor::lorentz(3, 2),
                                            SpaceDescriptor::orlicz(YoungFunction::power_log(2))};
  for (const auto& s : spaces)
    for (double t : {0.5, 2.0, 3.0})
      for (int k = 0; k < 10; ++k) {
        const auto m = mu(kothe::testing::random_weights(rng, 3));
        const auto tw = tuple({random_signed(rng, 3), random_signed(rng, 3)}, uniform(rng, 1.0, 4.0), m);
        const auto moved = lemma2_transport(tw, t);
        const auto st = power_space(s, t);
        EXPECT_NEAR(convexity_ratio(st, moved), std::pow(convexity_ratio(s, tw), t), 1e-9) << s.name();
        EXPECT_NEAR(concavity_ratio(st, moved), std::pow(concavity_ratio(s, tw), t), 1e-9) << s.name();
      }
}

TEST(Monotonicity, RatiosBelowRegisteredBoundAtLargerExponent) {
  // M^(t)(X) <= M^(r)(X) for t <= r: every ratio at t stays below the exact value at r.
  Rng rng(23);
  for (double p : {1.0, 2.0}) {
    const auto m = DiscreteMeasure::counting(3);
    const auto s = SpaceDescriptor::lp(p);
    for (double r : {2.0, 3.0}) {
      const double bound = *registered_convexity(s, r, m);
      for (int k = 0; k < 40; ++k) {
        const double t = uniform(rng, 0.5, r);
        const auto tw = tuple({random_signed(rng, 3), random_signed(rng, 3), random_signed(rng, 3)}, t, m);
        EXPECT_LE(convexity_ratio(s, tw), bound * (1.0 + 1e-9));
      }
      const auto e = estimate_space_constant(s, m, r - 0.5, ConstantKind::convexity, small_budget(24));
      EXPECT_LE(e.value, bound * (1.0 + 1e-9));
    }
  }
}

TEST(DualConstants, ConjugateExponentsSwapUnderDuality) {
  // M_(r')(X) = M^(r)(X^x) and M^(r')(X) = M_(r)(X^x) for L_p with closed-form
  // dual L_p': ratios of X at r' stay below the dual's constants at r, up to
  // the search gap of the estimate when no exact value is registered.
  Rng rng(25);
  const auto m = DiscreteMeasure::counting(2);
  const double r = 3.0, rc = conjugate(r);
  for (double p : {1.0, 1.5, 3.0}) {
    const auto x = SpaceDescriptor::lp(p);
    const auto xd = dual_space(x);
    const double conv_dual = registered_convexity(xd, r, m).value_or(
        estimate_space_constant(xd, m, r, ConstantKind::convexity, small_budget(26)).value);
    const double conc_dual = registered_concavity(xd, r, m).value_or(
        estimate_space_constant(xd, m, r, ConstantKind::concavity, small_budget(27)).value);
    for (int k = 0; k < 40; ++k) {
      const auto tw = tuple({random_nonnegative(rng, 2), random_nonnegative(rng, 2)}, rc, m);
      EXPECT_LE(concavity_ratio(x, tw), conv_dual * (1.0 + 1e-6)) << "p = " << p;
      EXPECT_LE(convexity_ratio(x, tw), conc_dual * (1.0 + 1e-6)) << "p = " << p;
    }
  }
}
