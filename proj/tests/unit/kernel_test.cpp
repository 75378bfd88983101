#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "vskte/errors.hpp"
#include "vskte/kernel.hpp"

namespace vskte {
namespace {

std::span<const double> sp(const std::vector<double>& v) { return v; }

TEST(KernelEval, IdenticalPointsGiveOne) {
  GaussianKernel k{0.37};
  std::vector<double> a{1.5, -2.0, 0.25};
  EXPECT_DOUBLE_EQ(kernel_eval(k, sp(a), sp(a)), 1.0);
}

TEST(KernelEval, DirectFormula) {
  EXPECT_NEAR(kernel_eval(GaussianKernel{1.0}, sp({0.0}), sp({1.0})), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(kernel_eval(GaussianKernel{5.0}, sp({0.0, 0.0}), sp({3.0, 4.0})), std::exp(-0.5), 1e-15);
}

TEST(KernelEval, DimensionMismatchIsInputError) {
  try {
    kernel_eval(GaussianKernel{1.0}, sp({0.0}), sp({1.0, 2.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::input);
  }
}

TEST(KernelEval, MonotoneInDistance) {
  GaussianKernel k{0.8};
  double prev = 2.0;
  for (double r = 0.0; r < 5.0; r += 0.25) {
    double v = kernel_eval(k, sp({0.0, 0.0}), sp({r, 0.0}));
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Gram, SinglePoint) {
  Matrix y(1, 1);
  y << 3.2;
  EXPECT_DOUBLE_EQ(gram(GaussianKernel{1.0}, y, y).values(0, 0), 1.0);
}

TEST(Gram, TransposeSymmetry) {
  Matrix a = testing::random_matrix(7, 3, 1), b = testing::random_matrix(5, 3, 2);
  GaussianKernel k{1.3};
  Matrix ab = gram(k, a, b).values, ba = gram(k, b, a).values;
  EXPECT_LT((ab - ba.transpose()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Gram, MatchesEntrywiseEvaluation) {
  Matrix p = testing::random_matrix(3, 1, 3);
  GaussianKernel k{1.0};
  Matrix g = gram(k, p, p).values;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      std::vector<double> a{p(i, 0)}, b{p(j, 0)};
      EXPECT_NEAR(g(i, j), kernel_eval(k, sp(a), sp(b)), 1e-12);
    }
}

TEST(Gram, EmptyPointSetIsInputError) {
  Matrix empty(0, 2), p = testing::random_matrix(2, 2, 4);
  EXPECT_THROW(gram(GaussianKernel{1.0}, empty, p), Error);
}

TEST(Gram, SymmetricPsdWithEntriesInUnitInterval) {
  for (unsigned seed : {5u, 6u, 7u}) {
    Matrix p = testing::random_matrix(200, 4, seed);
    Matrix g = gram(GaussianKernel{median_pairwise_distance(p)}, p, p).values;
    EXPECT_LT((g - g.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_GT(g.minCoeff(), 0.0);
    EXPECT_LE(g.maxCoeff(), 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig{Eigen::MatrixXd(g)};
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-8);
  }
}

TEST(ResolveLengthscale, MedianOfPairwiseDistances) {
  Matrix p(3, 1);
  p << 0.0, 1.0, 2.0;
  EXPECT_DOUBLE_EQ(resolve_lengthscale(KernelSpec::median(), p, DataRole::covariate), 1.0);
}

TEST(ResolveLengthscale, HalfMedianForOutcomes) {
  Matrix p(2, 1);
  p << 0.0, 2.0;
  EXPECT_DOUBLE_EQ(resolve_lengthscale(KernelSpec::half_median(), p, DataRole::outcome), 1.0);
}

TEST(ResolveLengthscale, EvenCountAveragesMiddlePair) {
  // distances 1, 3, 4, 2, 3, 1 -> sorted 1 1 2 3 3 4 -> median 2.5
  Matrix p(4, 1);
  p << 0.0, 1.0, 4.0, 3.0;
  Matrix q(4, 1);
  q << 0.0, 1.0, 3.0, 4.0;
  EXPECT_DOUBLE_EQ(median_pairwise_distance(q), 2.5);
  EXPECT_DOUBLE_EQ(median_pairwise_distance(p), 2.5);
}

TEST(ResolveLengthscale, FixedIgnoresData) {
  Matrix p = testing::random_matrix(10, 2, 8);
  EXPECT_DOUBLE_EQ(resolve_lengthscale(KernelSpec::fixed(2.0), p, DataRole::covariate), 2.0);
}

TEST(ResolveLengthscale, IdenticalPointsFallBackToOne) {
  Matrix p = Matrix::Constant(5, 2, 0.3);
  EXPECT_DOUBLE_EQ(resolve_lengthscale(KernelSpec::median(), p, DataRole::covariate), 1.0);
}

TEST(ResolveLengthscale, TooFewPointsIsInputError) {
  Matrix p(1, 2);
  p << 1.0, 2.0;
  EXPECT_THROW(resolve_lengthscale(KernelSpec::median(), p, DataRole::covariate), Error);
}

TEST(ResolveLengthscale, PermutationInvariant) {
  Matrix p = testing::random_matrix(31, 3, 9);
  Matrix q = p.colwise().reverse();
  std::vector<int> perm(31);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937(4));
  Matrix r(31, 3);
  for (int i = 0; i < 31; ++i) r.row(i) = p.row(perm[i]);
  double base = resolve_lengthscale(KernelSpec::median(), p, DataRole::covariate);
  EXPECT_DOUBLE_EQ(resolve_lengthscale(KernelSpec::median(), q, DataRole::covariate), base);
  EXPECT_DOUBLE_EQ(resolve_lengthscale(KernelSpec::median(), r, DataRole::covariate), base);
}

TEST(Precision, ConvertsToLengthscale) {
  EXPECT_DOUBLE_EQ(precision_to_lengthscale(4.0), 0.5);
  EXPECT_DOUBLE_EQ(KernelSpec::from_precision(2.0).fixed_lengthscale, 1.0 / std::sqrt(2.0));
  EXPECT_THROW(precision_to_lengthscale(0.0), Error);
}

}  // namespace
}  // namespace vskte
