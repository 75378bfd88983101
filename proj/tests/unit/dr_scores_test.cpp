#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "test_util.hpp"
#include "vskte/dr_scores.hpp"
#include "vskte/errors.hpp"
#include "vskte/kernel.hpp"

namespace vskte {
namespace {

TEST(IpwMultipliers, DirectSubstitution) {
  std::vector<int> a{1, 0, 1, 0};
  std::vector<double> p{0.5, 0.5, 0.8, 0.9};
  IpwMultipliers w = ipw_multipliers(a, p);
  EXPECT_DOUBLE_EQ(w.w(0), 2.0);
  EXPECT_DOUBLE_EQ(w.w(1), -2.0);
  EXPECT_DOUBLE_EQ(w.w(2), 1.25);
  EXPECT_NEAR(w.w(3), -10.0, 1e-12);
}

TEST(IpwMultipliers, SignAndMagnitude) {
  auto a = testing::random_actions(50, 1);
  auto p = testing::random_propensities(50, 2);
  IpwMultipliers w = ipw_multipliers(a, p);
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(w.w(i) > 0, a[i] == 1);
    EXPECT_GE(std::abs(w.w(i)), 1.0);
  }
}

TEST(IpwMultipliers, ClipsExtremePropensities) {
  std::vector<int> a{1, 0};
  std::vector<double> p{1e-9, 1.0 - 1e-9};
  IpwMultipliers w = ipw_multipliers(a, p);
  EXPECT_NEAR(w.w(0), 1.0 / kPropensityClip, 1e-9);
  EXPECT_NEAR(w.w(1), -1.0 / kPropensityClip, 1e-6);
}

TEST(IpwMultipliers, OutOfRangeIsInputError) {
  std::vector<int> a{1};
  for (double bad : {0.0, 1.0, -0.2, 1.5}) {
    std::vector<double> p{bad};
    EXPECT_THROW(ipw_multipliers(a, p), Error);
  }
}

TEST(DrCoefficients, IdentitySmootherGivesDiagonal) {
  std::vector<int> a{0, 1, 1};
  std::vector<double> p{0.3, 0.6, 0.5};
  NuisanceOperators ops{{0, 1, 2}, Matrix::Zero(3, 3), Matrix::Identity(3, 3)};
  IpwMultipliers w = ipw_multipliers(a, p);
  DrCoefficients d = dr_coefficients(ops, w);
  EXPECT_LT((d.d - Matrix(w.w.asDiagonal())).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(DrCoefficients, HugeRidgeApproachesDiagonal) {
  Matrix x = testing::random_matrix(12, 2, 3);
  auto a = testing::random_actions(12, 4);
  auto p = testing::random_propensities(12, 5);
  FoldSmoothers s = arm_smoothers(gram(GaussianKernel{1.0}, x, x).values, a, 1e12);
  IpwMultipliers w = ipw_multipliers(a, p);
  EXPECT_LT((dr_coefficients(s, w).d - Matrix(w.w.asDiagonal())).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(DrCoefficients, TwoPointWorkedInstance) {
  std::vector<int> a{0, 1};
  std::vector<double> p{0.5, 0.5};
  FoldSmoothers s = arm_smoothers(Matrix::Identity(2, 2), a, 1.0);
  // Delta = [[-1/2, 0], [0, 1/2]], R = [[1/2, 0], [0, 1/2]], w = (-2, 2).
  Matrix expected(2, 2);
  expected << -1.5, 0.0, 0.0, 1.5;
  DrCoefficients d = dr_coefficients(s, ipw_multipliers(a, p));
  EXPECT_LT((d.d - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((d.d - (s.delta + s.residual * ipw_multipliers(a, p).w.asDiagonal())).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CrossMatrix, IdentityCoefficientsReturnGram) {
  Matrix y0 = testing::random_matrix(4, 1, 6), y1 = testing::random_matrix(5, 1, 7);
  GramBlock k = gram(GaussianKernel{1.0}, y0, y1);
  DrCoefficients d0{{0, 1, 2, 3}, Matrix::Identity(4, 4)}, d1{{0, 1, 2, 3, 4}, Matrix::Identity(5, 5)};
  EXPECT_LT((cross_matrix(d0, k, d1) - k.values).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(CrossMatrix, LinearKernelMatchesFeatureSpace) {
  for (unsigned seed : {8u, 9u, 10u, 11u}) {
    Matrix y0 = testing::random_matrix(6, 1, seed), y1 = testing::random_matrix(7, 1, seed + 50);
    Matrix c0 = testing::random_matrix(6, 6, seed + 100), c1 = testing::random_matrix(7, 7, seed + 150);
    GramBlock k{{}, {}, y0 * y1.transpose()};
    Matrix g = cross_matrix(DrCoefficients{{}, c0}, k, DrCoefficients{{}, c1});
    EXPECT_LT((g - oracle::linear_feature_cross(c0, y0, c1, y1)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(CrossMatrix, Bilinearity) {
  Matrix y0 = testing::random_matrix(5, 2, 12), y1 = testing::random_matrix(5, 2, 13);
  GramBlock k = gram(GaussianKernel{0.9}, y0, y1);
  Matrix a = testing::random_matrix(5, 5, 14), b = testing::random_matrix(5, 5, 15),
         c = testing::random_matrix(5, 5, 16);
  Matrix lhs = cross_matrix({{}, 2.0 * a + b}, k, {{}, c});
  Matrix rhs = 2.0 * cross_matrix({{}, a}, k, {{}, c}) + cross_matrix({{}, b}, k, {{}, c});
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10);
  GramBlock scaled = k;
  scaled.values *= 3.5;
  EXPECT_LT((cross_matrix({{}, a}, scaled, {{}, c}) - 3.5 * cross_matrix({{}, a}, k, {{}, c})).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(CrossMatrix, DimensionMismatchIsInputError) {
  GramBlock k{{}, {}, Matrix::Ones(3, 4)};
  EXPECT_THROW(cross_matrix({{}, Matrix::Identity(3, 3)}, k, {{}, Matrix::Identity(3, 3)}), Error);
}

TEST(DrIdentity, ExactEnumerationWithWrongModel) {
  oracle::DrToy toy;
  for (int target = 0; target < 2; ++target) EXPECT_NEAR(toy.enumerate(target), toy.target_mean(target), 1e-12);
}

TEST(DrIdentity, MonteCarloMeanOfImplementedScore) {
  oracle::DrToy toy;
  auto mc = toy.monte_carlo(200000, 20240607);
  for (int target = 0; target < 2; ++target)
    EXPECT_LT(std::abs(mc[target] - toy.target_mean(target)), 0.01 * std::abs(toy.target_mean(target)));
}

}  // namespace
}  // namespace vskte
