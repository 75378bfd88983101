#pragma once

#include "vskte/types.hpp"

// OpenMP kernels. Every output entry is computed by exactly one thread with a
// fixed accumulation order, so results do not depend on the thread count.
namespace vskte::parallel {

Matrix pairwise_sq_distances(const Matrix& a, const Matrix& b);
Matrix symmetric_sq_distances(const Matrix& points);
Matrix gaussian_from_sq(const Matrix& sq, double lengthscale);

}  // namespace vskte::parallel
