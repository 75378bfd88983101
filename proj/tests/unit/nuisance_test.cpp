#include <gtest/gtest.h>

#include "oracles.hpp"
#include "test_util.hpp"
#include "vskte/errors.hpp"
#include "vskte/kernel.hpp"
#include "vskte/nuisance.hpp"

namespace vskte {
namespace {

Matrix gaussian_gram(const Matrix& x) {
  return gram(GaussianKernel{median_pairwise_distance(x)}, x, x).values;
}

IndexList iota(std::size_t n, std::size_t start = 0) {
  IndexList v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = start + i;
  return v;
}

using oracle::feature_ridge;

TEST(ArmSmoothers, StructuralInvariants) {
  Matrix x = testing::random_matrix(20, 3, 11);
  auto a = testing::random_actions(20, 12);
  FoldSmoothers s = arm_smoothers(gaussian_gram(x), a, 1e-2);
  EXPECT_LT((s.mu - (s.mu0 + s.mu1)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((s.residual - (Matrix::Identity(20, 20) - s.mu)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((s.delta - (s.mu1 - s.mu0)).cwiseAbs().maxCoeff(), 1e-12);
  for (int j = 0; j < 20; ++j) {
    if (a[j] == 1) EXPECT_EQ(s.mu0.col(j).cwiseAbs().maxCoeff(), 0.0);
    else EXPECT_EQ(s.mu1.col(j).cwiseAbs().maxCoeff(), 0.0);
  }
  EXPECT_EQ(s.control_idx.size() + s.treated_idx.size(), 20u);
}

TEST(ArmSmoothers, HugeRidgeShrinksToZero) {
  Matrix x = testing::random_matrix(15, 2, 13);
  FoldSmoothers s = arm_smoothers(gaussian_gram(x), testing::random_actions(15, 14), 1e12);
  EXPECT_LT(s.mu.cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((s.residual - Matrix::Identity(15, 15)).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT(s.delta.cwiseAbs().maxCoeff(), 1e-6);
}

TEST(ArmSmoothers, TwoPointHandSolution) {
  std::vector<int> a{0, 1};
  FoldSmoothers s = arm_smoothers(Matrix::Identity(2, 2), a, 1.0);
  Matrix mu0(2, 2), mu1(2, 2);
  mu0 << 0.5, 0.0, 0.0, 0.0;
  mu1 << 0.0, 0.0, 0.0, 0.5;
  EXPECT_LT((s.mu0 - mu0).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((s.mu1 - mu1).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ArmSmoothers, MissingArmIsDegenerateFold) {
  std::vector<int> a(5, 1);
  try {
    arm_smoothers(Matrix::Identity(5, 5), a, 1e-2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate_fold);
  }
}

TEST(ArmSmoothers, NonPositiveRidgeIsInputError) {
  std::vector<int> a{0, 1};
  EXPECT_THROW(arm_smoothers(Matrix::Identity(2, 2), a, 0.0), Error);
}

TEST(ArmSmoothers, LinearKernelMatchesFeatureSpaceRidge) {
  for (unsigned seed : {21u, 22u, 23u}) {
    Matrix phi = testing::random_matrix(30, 2, seed);
    auto a = testing::random_actions(30, seed + 100);
    Vector y = testing::random_matrix(30, 1, seed + 200).col(0);
    const double lambda = 0.3;
    FoldSmoothers s = arm_smoothers(phi * phi.transpose(), a, lambda);
    for (int arm = 0; arm < 2; ++arm) {
      Vector oracle = feature_ridge(phi, a, arm, y, lambda, phi);
      Vector got = (arm == 0 ? s.mu0 : s.mu1) * y;
      EXPECT_LT((got - oracle).cwiseAbs().maxCoeff(), 1e-8);
    }
  }
}

TEST(SequentialOperators, ColumnsUseOnlyPastSameFoldRounds) {
  Matrix phi = testing::random_matrix(25, 2, 31);
  auto a = testing::random_actions(25, 32);
  Vector y = testing::random_matrix(25, 1, 33).col(0);
  const double lambda = 0.2;
  NuisanceOperators ops = sequential_operators(phi * phi.transpose(), a, lambda, iota(25));
  for (int j = 0; j < 25; ++j) {
    // Oracle: ridge fits on rounds < j only, evaluated at round j.
    Matrix past_phi = phi.topRows(j);
    std::vector<int> past_a(a.begin(), a.begin() + j);
    Vector past_y = y.head(j);
    double pred[2] = {0.0, 0.0};
    for (int arm = 0; arm < 2; ++arm)
      if (std::count(past_a.begin(), past_a.end(), arm) > 0)
        pred[arm] = feature_ridge(past_phi, past_a, arm, past_y, lambda, phi.row(j))(0);
    EXPECT_NEAR(ops.delta.col(j).dot(y), pred[1] - pred[0], 1e-8);
    EXPECT_NEAR(ops.residual.col(j).dot(y), y(j) - pred[a[j]], 1e-8);
    for (int s = j + 1; s < 25; ++s) {
      EXPECT_EQ(ops.delta(s, j), 0.0);
      EXPECT_EQ(ops.residual(s, j), 0.0);
    }
  }
}

TEST(SequentialOperators, Predictable) {
  Matrix x = testing::random_matrix(30, 3, 41);
  auto a = testing::random_actions(30, 42);
  NuisanceOperators base = sequential_operators(gaussian_gram(x), a, 1e-2, iota(30));
  Matrix x2 = x;
  x2.bottomRows(9) = testing::random_matrix(9, 3, 43);
  auto a2 = a;
  for (int i = 20; i < 30; ++i) a2[i] = 1 - a2[i];
  // Same bandwidth so only the mutated rounds differ.
  GaussianKernel k{median_pairwise_distance(x)};
  NuisanceOperators base_fixed = sequential_operators(gram(k, x, x).values, a, 1e-2, iota(30));
  NuisanceOperators mutated = sequential_operators(gram(k, x2, x2).values, a2, 1e-2, iota(30));
  EXPECT_LT((base_fixed.delta.leftCols(21) - mutated.delta.leftCols(21)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((base_fixed.residual.leftCols(20) - mutated.residual.leftCols(20)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(base.basis.size(), 30u);
}

TEST(CrossfitOperators, MatchesOppositeFoldRidge) {
  Matrix phi = testing::random_matrix(40, 2, 51);
  auto a = testing::random_actions(40, 52);
  Vector y = testing::random_matrix(40, 1, 53).col(0);
  const double lambda = 0.5;
  Matrix own = phi.topRows(20), other = phi.bottomRows(20);
  std::vector<int> a_own(a.begin(), a.begin() + 20), a_other(a.begin() + 20, a.end());
  a_other[0] = 0;
  a_other[1] = 1;
  NuisanceOperators ops = crossfit_operators(own * other.transpose(), other * other.transpose(), a_own, a_other,
                                             lambda, iota(20), iota(20, 20));
  Vector y_other = y.tail(20);
  Vector pred0 = feature_ridge(other, a_other, 0, y_other, lambda, own);
  Vector pred1 = feature_ridge(other, a_other, 1, y_other, lambda, own);
  ASSERT_EQ(ops.basis.size(), 40u);
  for (int i = 0; i < 20; ++i) {
    EXPECT_NEAR(ops.delta.col(i).dot(y), pred1(i) - pred0(i), 1e-8);
    EXPECT_NEAR(ops.residual.col(i).dot(y), y(i) - (a_own[i] ? pred1(i) : pred0(i)), 1e-8);
  }
}

TEST(NuisanceMode, ParsesNames) {
  EXPECT_EQ(parse_nuisance_mode("hat"), NuisanceMode::hat);
  EXPECT_EQ(parse_nuisance_mode("crossfit"), NuisanceMode::crossfit);
  EXPECT_EQ(parse_nuisance_mode("sequential"), NuisanceMode::sequential);
  EXPECT_THROW(parse_nuisance_mode("oracle"), Error);
}

}  // namespace
}  // namespace vskte
