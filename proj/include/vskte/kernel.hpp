#pragma once

#include <cmath>
#include <span>

#include "vskte/types.hpp"

namespace vskte {

enum class KernelFamily { gaussian };
enum class LengthscaleRule { fixed, median, half_median };
enum class DataRole { covariate, outcome };

struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;
  LengthscaleRule rule = LengthscaleRule::median;
  double fixed_lengthscale = 1.0;

  static KernelSpec fixed(double lengthscale);
  static KernelSpec median();
  static KernelSpec half_median();
  // Precision p means exp(-p * |a-b|^2 / 2), i.e. lengthscale p^{-1/2}.
  static KernelSpec from_precision(double precision);
};

double precision_to_lengthscale(double precision);

// Gaussian kernel with a resolved lengthscale: exp(-|a-b|^2 / (2 gamma^2)).
struct GaussianKernel {
  double lengthscale = 1.0;

  double from_sq_distance(double sq) const {
    return std::exp(-sq / (2.0 * lengthscale * lengthscale));
  }
};

struct GramBlock {
  IndexList rows;
  IndexList cols;
  Matrix values;
};

double kernel_eval(const GaussianKernel& k, std::span<const double> a, std::span<const double> b);

// Rows of `row_points` / `col_points` are the points. Ids default to 0..n-1.
GramBlock gram(const GaussianKernel& k, const Matrix& row_points, const Matrix& col_points);
GramBlock gram(const GaussianKernel& k, const Matrix& row_points, const Matrix& col_points,
               IndexList row_ids, IndexList col_ids);

double median_pairwise_distance(const Matrix& points);
double median_from_sq_distances(const Matrix& sq_distances);

double resolve_lengthscale(const KernelSpec& spec, const Matrix& points, DataRole role);
// Same rule applied to a precomputed symmetric squared-distance matrix.
double resolve_lengthscale_from_sq(const KernelSpec& spec, const Matrix& sq_distances, DataRole role);

// Principal submatrix / cross block of a full matrix by index lists.
Matrix submatrix(const Matrix& full, const IndexList& rows, const IndexList& cols);

}  // namespace vskte
