#include "vskte/parallel_kernels.hpp"

#include <cmath>

#include "vskte/errors.hpp"

namespace vskte::parallel {

Matrix pairwise_sq_distances(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) fail(ErrorKind::input, "pairwise_sq_distances: dimension mismatch");
  const Eigen::Index n = a.rows(), m = b.rows(), d = a.cols();
  Matrix out(n, m);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* ai = a.row(i).data();
    for (Eigen::Index j = 0; j < m; ++j) {
      const double* bj = b.row(j).data();
      double s = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        double diff = ai[k] - bj[k];
        s += diff * diff;
      }
      out(i, j) = s;
    }
  }
  return out;
}

Matrix symmetric_sq_distances(const Matrix& points) {
  const Eigen::Index n = points.rows(), d = points.cols();
  Matrix out = Matrix::Zero(n, n);
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* pi = points.row(i).data();
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double* pj = points.row(j).data();
      double s = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        double diff = pi[k] - pj[k];
        s += diff * diff;
      }
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  return out;
}

Matrix gaussian_from_sq(const Matrix& sq, double lengthscale) {
  const double scale = -1.0 / (2.0 * lengthscale * lengthscale);
  Matrix out(sq.rows(), sq.cols());
  const Eigen::Index n = sq.size();
  const double* src = sq.data();
  double* dst = out.data();
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) dst[i] = std::exp(src[i] * scale);
  return out;
}

}  // namespace vskte::parallel
