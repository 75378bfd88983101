#include <omp.h>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "vskte/parallel_kernels.hpp"
#include "vskte/reference.hpp"

namespace vskte {
namespace {

// The serial reference may round differently (the optimiser is free to
// vectorise either loop), so it is compared with a tolerance; different thread
// counts of the parallel kernel must agree bit for bit.
double max_rel(const Matrix& a, const Matrix& b) {
  return ((a - b).array().abs() / (1.0 + b.array().abs())).maxCoeff();
}

template <typename F>
Matrix with_threads(int n, F f) {
  const int saved = omp_get_max_threads();
  omp_set_num_threads(n);
  Matrix m = f();
  omp_set_num_threads(saved);
  return m;
}

class ThreadCounts : public ::testing::TestWithParam<int> {};

TEST_P(ThreadCounts, PairwiseDistancesMatchSerial) {
  Matrix a = testing::random_matrix(57, 4, 1), b = testing::random_matrix(33, 4, 2);
  auto run = [&] { return parallel::pairwise_sq_distances(a, b); };
  Matrix p = with_threads(GetParam(), run);
  EXPECT_LT(max_rel(p, reference::pairwise_sq_distances(a, b)), 1e-14);
  EXPECT_EQ(p, with_threads(1, run));
}

TEST_P(ThreadCounts, SymmetricDistancesMatchSerial) {
  Matrix a = testing::random_matrix(101, 3, 3);
  auto run = [&] { return parallel::symmetric_sq_distances(a); };
  Matrix p = with_threads(GetParam(), run);
  EXPECT_LT(max_rel(p, reference::symmetric_sq_distances(a)), 1e-14);
  EXPECT_EQ(p, with_threads(1, run));
  EXPECT_EQ(p, p.transpose());
  EXPECT_EQ(p.diagonal(), Vector::Zero(101));
}

TEST_P(ThreadCounts, GaussianMapMatchesSerial) {
  Matrix sq = reference::symmetric_sq_distances(testing::random_matrix(64, 2, 4));
  auto run = [&] { return parallel::gaussian_from_sq(sq, 0.7); };
  Matrix p = with_threads(GetParam(), run);
  EXPECT_LT(max_rel(p, reference::gaussian_from_sq(sq, 0.7)), 1e-14);
  EXPECT_EQ(p, with_threads(1, run));
}

INSTANTIATE_TEST_SUITE_P(OneAndMany, ThreadCounts, ::testing::Values(1, 2, 4, 7));

TEST(SerialReference, GaussianFromDistances) {
  Matrix sq(1, 2);
  sq << 0.0, 2.0;
  Matrix g = reference::gaussian_from_sq(sq, 1.0);
  EXPECT_DOUBLE_EQ(g(0, 0), 1.0);
  EXPECT_NEAR(g(0, 1), std::exp(-1.0), 1e-15);
}

}  // namespace
}  // namespace vskte
