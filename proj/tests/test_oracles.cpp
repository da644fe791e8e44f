#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "kothe/oracles.hpp"
#include "kothe/weights.hpp"

using namespace kothe;
using kothe::testing::mu;

namespace {

oracle::WeightProblem euclidean_problem(const Eigen::MatrixXd& t, const DiscreteMeasure& nu) {
  return {[t](std::span<const double> x) {
            Vec y(static_cast<std::size_t>(t.rows()), 0.0);
            for (Eigen::Index i = 0; i < t.rows(); ++i)
              for (Eigen::Index j = 0; j < t.cols(); ++j) y[static_cast<std::size_t>(i)] += t(i, j) * x[static_cast<std::size_t>(j)];
            return y;
          },
          [](std::span<const double> x) {
            double s = 0.0;
            for (double v : x) s += v * v;
            return std::sqrt(s);
          },
          static_cast<std::size_t>(t.cols()), SpaceDescriptor::lp(1), nu};
}

Eigen::MatrixXd worked_matrix() {
  Eigen::MatrixXd t(2, 1);
  t << 1, 1;
  return t;
}

}  // namespace

TEST(BruteWeight, WorkedExampleOnFineGrid) {
  const auto prob = euclidean_problem(worked_matrix(), DiscreteMeasure::counting(2));
  const auto res = oracle::brute_weight_search(prob, 2.0, 2.0, oracle::uniform_grid(2, 0.0, 4.0, 201));
  ASSERT_TRUE(res.feasible);
  EXPECT_NEAR(res.omega[0], 2.0, 0.02);
  EXPECT_NEAR(res.omega[1], 2.0, 0.02);
  EXPECT_NEAR(res.norm, 2.0, 1e-9);
  EXPECT_EQ(res.checked, 201u * 201u);
}

TEST(BruteWeight, ConstantTooSmall) {
  const auto prob = euclidean_problem(worked_matrix(), DiscreteMeasure::counting(2));
  const auto res = oracle::brute_weight_search(prob, 2.0, 1.5, oracle::uniform_grid(2, 0.0, 4.0, 201));
  EXPECT_FALSE(res.feasible);
  EXPECT_NEAR(res.limit, 1.5, 1e-12);
}

TEST(BruteWeight, SingleAtomBisection) {
  // nu |a x|^2 / omega <= x^2 is tight at omega = nu a^2
  Eigen::MatrixXd t(1, 1);
  t << 1.5;
  const auto res = oracle::brute_weight_search(euclidean_problem(t, mu({2.0})), 2.0, 10.0, {});
  ASSERT_TRUE(res.feasible);
  EXPECT_NEAR(res.omega[0], 2.0 * 1.5 * 1.5, 1e-9);
}

TEST(BruteWeight, MonotoneUnderRefinement) {
  Rng rng(80);
  const Eigen::MatrixXd t = kothe::testing::random_matrix(rng, 2, 2);
  const auto prob = euclidean_problem(t, DiscreteMeasure::counting(2));
  double previous = kInf;
  for (std::size_t steps : {11u, 21u, 41u, 81u}) {  // nested grids
    const auto res = oracle::brute_weight_search(prob, 2.0, 100.0, oracle::uniform_grid(2, 0.0, 4.0, steps));
    EXPECT_LE(res.norm, previous);
    previous = res.norm;
  }
}

TEST(BruteWeight, AgreesWithSolver) {
  Rng rng(81);
  for (int k = 0; k < 3; ++k) {
    const Eigen::MatrixXd t = kothe::testing::random_matrix(rng, 2, 2);
    const auto nu = DiscreteMeasure::counting(2);
    const auto brute = oracle::brute_weight_search(euclidean_problem(t, nu), 2.0, 100.0,
                                                   oracle::uniform_grid(2, 0.0, 3.0, 301), 81);
    const auto cert = solve_weight_pair(kothe::testing::euclidean_into(t, 1.0, nu), 2.0, 100.0);
    EXPECT_NEAR(cert.codomain_bound, brute.norm, 0.02 * brute.norm);
  }
}

TEST(BruteWeight, Guards) {
  const auto prob = euclidean_problem(worked_matrix(), DiscreteMeasure::counting(2));
  EXPECT_THROW(oracle::brute_weight_search(prob, 2.0, 2.0, oracle::uniform_grid(2, 0.0, 4.0, 2000, 1000)),
               InvalidArgument);
  EXPECT_THROW(oracle::brute_weight_search(prob, 2.0, 2.0, oracle::uniform_grid(3, 0.0, 4.0, 5)), DimensionError);
  const auto big = euclidean_problem(Eigen::MatrixXd::Ones(5, 1), DiscreteMeasure::counting(5));
  EXPECT_THROW(oracle::brute_weight_search(big, 2.0, 2.0, oracle::uniform_grid(5, 0.0, 1.0, 2)), InvalidArgument);
}

TEST(TupleSearch, Examples) {
  const auto m = DiscreteMeasure::counting(2);
  EXPECT_NEAR(oracle::exhaustive_tuple_search(SpaceDescriptor::lp(1), m, 2.0, true, 2, 21).value, std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(oracle::exhaustive_tuple_search(SpaceDescriptor::lp(2), m, 2.0, true, 2, 11).value, 1.0, 1e-9);
  EXPECT_NEAR(oracle::exhaustive_tuple_search(SpaceDescriptor::lp(kInf), m, 2.0, false, 2, 21).value, std::sqrt(2.0),
              1e-9);
}

TEST(TupleSearch, WitnessReproducesValue) {
  const auto s = SpaceDescriptor::lorentz(3, 2);
  const auto m = mu({1, 2});
  const auto res = oracle::exhaustive_tuple_search(s, m, 2.0, true, 2, 11);
  EXPECT_NEAR(convexity_ratio(s, TupleWitness{res.witness, 2.0, m}), res.value, 1e-12);
}

TEST(TupleSearch, Guards) {
  const auto m = DiscreteMeasure::counting(4);
  EXPECT_THROW(oracle::exhaustive_tuple_search(SpaceDescriptor::lp(1), m, 2.0, true, 2, 5), InvalidArgument);
  EXPECT_THROW(oracle::exhaustive_tuple_search(SpaceDescriptor::lp(1), DiscreteMeasure::counting(3), 2.0, true, 3, 50,
                                               1000),
               InvalidArgument);
}

TEST(HilbertOracle, DiagonalClosedForm) {
  // lambda_max(diag(nu d^2 / omega)) <= 1 is omega_i >= nu_i d_i^2 and the
  // objective increases in every omega_i.
  const Vec d{1.0, -0.5, 2.0};
  const auto nu = mu({1, 2, 0.5});
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(3, 3);
  for (int i = 0; i < 3; ++i) t(i, i) = d[static_cast<std::size_t>(i)];
  for (double p : {1.0, 1.5}) {
    const double s = 2.0 * p / (2.0 - p);
    double acc = 0.0;
    for (std::size_t i = 0; i < 3; ++i) acc += nu[i] * std::pow(nu[i] * d[i] * d[i], s / 2.0);
    const double closed = std::pow(acc, 1.0 / s);
    const auto hb = oracle::hilbert_weight_oracle(t, p, nu, 10.0);
    EXPECT_LE(hb.lower, closed * (1.0 + 1e-9));
    EXPECT_GE(hb.upper, closed * (1.0 - 1e-9));
    EXPECT_LE(hb.upper - hb.lower, 0.01 * hb.upper);
  }
}

TEST(HilbertOracle, ZeroOperator) {
  const auto hb = oracle::hilbert_weight_oracle(Eigen::MatrixXd::Zero(2, 2), 1.0, mu({1, 1}), 1.0);
  EXPECT_EQ(hb.lower, 0.0);
  EXPECT_EQ(hb.upper, 0.0);
  EXPECT_TRUE(hb.feasible);
}

TEST(HilbertOracle, WorkedExample) {
  const auto hb = oracle::hilbert_weight_oracle(worked_matrix(), 1.0, DiscreteMeasure::counting(2), 2.0);
  EXPECT_LE(hb.lower, 2.0 + 1e-9);
  EXPECT_GE(hb.upper, 2.0 - 1e-9);
  EXPECT_LE(hb.upper - hb.lower, 0.01 * hb.upper);
  EXPECT_NEAR(hb.omega[0], 2.0, 0.02);
}

TEST(HilbertOracle, Guards) {
  EXPECT_THROW(oracle::hilbert_weight_oracle(Eigen::MatrixXd::Ones(2, 2), 2.0, mu({1, 1}), 1.0), InvalidArgument);
  EXPECT_THROW(oracle::hilbert_weight_oracle(Eigen::MatrixXd::Ones(7, 2), 1.0, DiscreteMeasure::counting(7), 1.0),
               InvalidArgument);
  EXPECT_THROW(oracle::hilbert_weight_oracle(Eigen::MatrixXd::Ones(2, 2), 1.0, mu({1, 1, 1}), 1.0), DimensionError);
}

TEST(OtherOracles, GridDualNormOfL1IsMax) {
  EXPECT_NEAR(oracle::grid_dual_norm(SpaceDescriptor::lp(1), Vec{3, 4}, mu({1, 1}), 41), 4.0, 1e-9);
}

TEST(OtherOracles, BruteConvexificationOfNormedSpace) {
  const Vec x{1, 2};
  EXPECT_NEAR(oracle::brute_convexification(SpaceDescriptor::lp(2), x, mu({1, 1}), 2, 51),
              norm(SpaceDescriptor::lp(2), x, mu({1, 1})), 1e-9);
}
