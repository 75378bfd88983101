#include "vskte/reference.hpp"

#include <algorithm>
#include <cmath>

#include "vskte/errors.hpp"

namespace vskte::reference {

Matrix pairwise_sq_distances(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) fail(ErrorKind::input, "pairwise_sq_distances: dimension mismatch");
  Matrix out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j) out(i, j) = (a.row(i) - b.row(j)).squaredNorm();
  return out;
}

Matrix symmetric_sq_distances(const Matrix& points) { return pairwise_sq_distances(points, points); }

Matrix gaussian_from_sq(const Matrix& sq, double lengthscale) {
  return (sq.array() * (-1.0 / (2.0 * lengthscale * lengthscale))).exp().matrix();
}

StabilizationWeights weight_series(const FoldWeightInputs& in, const WeightConfig& config, int fold_id) {
  const std::size_t n = in.actions.size();
  if (!in.ops || !in.kyy || !in.eval_treated ||
      in.eval_treated->rows() != static_cast<Eigen::Index>(n))
    fail(ErrorKind::input, "reference::weight_series: inconsistent inputs");
  const std::size_t warmup = std::max<std::size_t>(config.warmup_min, 1);
  StabilizationWeights out;
  out.fold_id = fold_id;
  out.omega_max = config.omega_max;
  out.omega = Vector::Zero(n);
  out.warmup_mask.assign(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    if (k < warmup) {
      out.warmup_mask[k] = true;
      out.omega(k) = config.warmup == WarmupPolicy::unit ? 1.0 : 0.0;
      continue;
    }
    std::vector<double> eval(n);
    for (std::size_t s = 0; s < n; ++s) eval[s] = (*in.eval_treated)(k, s);
    DrCoefficients d_t = dr_coefficients(*in.ops, ipw_multipliers(in.actions, eval, config.clip), "snapshot");
    Vector rho = importance_ratios(std::span<const double>(eval).subspan(0, k),
                                   in.logged_treated.subspan(0, k), in.actions.subspan(0, k));
    Moments m = conditional_moments(d_t, *in.kyy, past_weights(rho, config.normalization));
    out.omega(k) = stabilization_weight(m.m1_sq, m.m2, config.variance_floor, config.omega_max);
  }
  return out;
}

}  // namespace vskte::reference
