#include "vskte/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vskte/errors.hpp"
#include "vskte/parallel_kernels.hpp"

namespace vskte {

KernelSpec KernelSpec::fixed(double lengthscale) {
  if (!(lengthscale > 0.0)) fail(ErrorKind::input, "fixed lengthscale must be positive");
  return {KernelFamily::gaussian, LengthscaleRule::fixed, lengthscale};
}

KernelSpec KernelSpec::median() { return {KernelFamily::gaussian, LengthscaleRule::median, 1.0}; }

KernelSpec KernelSpec::half_median() {
  return {KernelFamily::gaussian, LengthscaleRule::half_median, 1.0};
}

KernelSpec KernelSpec::from_precision(double precision) {
  return fixed(precision_to_lengthscale(precision));
}

double precision_to_lengthscale(double precision) {
  if (!(precision > 0.0)) fail(ErrorKind::input, "precision must be positive");
  return 1.0 / std::sqrt(precision);
}

double kernel_eval(const GaussianKernel& k, std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::input, "kernel_eval: dimension mismatch");
  if (!(k.lengthscale > 0.0)) fail(ErrorKind::input, "kernel_eval: lengthscale must be positive");
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double diff = a[i] - b[i];
    sq += diff * diff;
  }
  return k.from_sq_distance(sq);
}

static IndexList iota_ids(std::size_t n) {
  IndexList ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

GramBlock gram(const GaussianKernel& k, const Matrix& row_points, const Matrix& col_points) {
  return gram(k, row_points, col_points, iota_ids(row_points.rows()), iota_ids(col_points.rows()));
}

GramBlock gram(const GaussianKernel& k, const Matrix& row_points, const Matrix& col_points,
               IndexList row_ids, IndexList col_ids) {
  if (row_points.rows() == 0 || col_points.rows() == 0) fail(ErrorKind::input, "gram: empty point set");
  if (row_points.cols() != col_points.cols()) fail(ErrorKind::input, "gram: dimension mismatch");
  if (row_ids.size() != static_cast<std::size_t>(row_points.rows()) ||
      col_ids.size() != static_cast<std::size_t>(col_points.rows()))
    fail(ErrorKind::input, "gram: id list length mismatch");
  if (!(k.lengthscale > 0.0)) fail(ErrorKind::input, "gram: lengthscale must be positive");
  GramBlock g;
  g.rows = std::move(row_ids);
  g.cols = std::move(col_ids);
  g.values = parallel::gaussian_from_sq(parallel::pairwise_sq_distances(row_points, col_points),
                                        k.lengthscale);
  return g;
}

static double median_in_place(std::vector<double>& v) {
  std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

double median_from_sq_distances(const Matrix& sq) {
  const std::size_t n = sq.rows();
  if (n < 2) fail(ErrorKind::input, "median rule needs at least 2 points");
  std::vector<double> d;
  d.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d.push_back(std::sqrt(std::max(sq(i, j), 0.0)));
  return median_in_place(d);
}

double median_pairwise_distance(const Matrix& points) {
  if (points.rows() < 2) fail(ErrorKind::input, "median rule needs at least 2 points");
  return median_from_sq_distances(parallel::symmetric_sq_distances(points));
}

double resolve_lengthscale_from_sq(const KernelSpec& spec, const Matrix& sq, DataRole role) {
  if (spec.rule == LengthscaleRule::fixed) {
    if (!(spec.fixed_lengthscale > 0.0)) fail(ErrorKind::input, "fixed lengthscale must be positive");
    return spec.fixed_lengthscale;
  }
  if (sq.rows() < 2)
    fail(ErrorKind::input, std::string("median rule needs at least 2 ") +
                               (role == DataRole::covariate ? "covariate" : "outcome") + " points");
  double med = median_from_sq_distances(sq);
  if (!(med > 0.0)) return 1.0;
  return spec.rule == LengthscaleRule::half_median ? med / 2.0 : med;
}

double resolve_lengthscale(const KernelSpec& spec, const Matrix& points, DataRole role) {
  if (spec.rule == LengthscaleRule::fixed) return resolve_lengthscale_from_sq(spec, Matrix(), role);
  if (points.rows() < 2) return resolve_lengthscale_from_sq(spec, Matrix(points.rows(), points.rows()), role);
  return resolve_lengthscale_from_sq(spec, parallel::symmetric_sq_distances(points), role);
}

Matrix submatrix(const Matrix& full, const IndexList& rows, const IndexList& cols) {
  Matrix out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = full(rows[i], cols[j]);
  return out;
}

}  // namespace vskte
