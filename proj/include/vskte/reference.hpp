#pragma once

#include "vskte/stabilization.hpp"
#include "vskte/types.hpp"

// Serial, cache-free implementations kept as oracles for the OpenMP kernels
// and the cached moment evaluation.
namespace vskte::reference {

Matrix pairwise_sq_distances(const Matrix& a, const Matrix& b);
Matrix symmetric_sq_distances(const Matrix& points);
Matrix gaussian_from_sq(const Matrix& sq, double lengthscale);

// Rebuilds D_t and evaluates both moments column by column for every t.
StabilizationWeights weight_series(const FoldWeightInputs& in, const WeightConfig& config,
                                   int fold_id = 0);

}  // namespace vskte::reference
