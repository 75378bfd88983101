#include "vskte/kte_test.hpp"

#include <cmath>

#include "vskte/errors.hpp"
#include "vskte/normal.hpp"
#include "vskte/parallel_kernels.hpp"

namespace vskte {

Sidedness parse_sidedness(const std::string& name) {
  if (name == "one-sided" || name == "one_sided") return Sidedness::one_sided;
  if (name == "two-sided" || name == "two_sided") return Sidedness::two_sided;
  fail(ErrorKind::input, "unknown sidedness '" + name + "' (one-sided, two-sided)");
}

const char* to_string(Sidedness s) { return s == Sidedness::one_sided ? "one-sided" : "two-sided"; }

PreparedData prepare(const Trajectory& traj, const FoldSplit& split, const KernelConfig& kernels) {
  if (traj.size() < 4) fail(ErrorKind::input, "trajectory needs at least 4 rounds");
  if (split[0].size() + split[1].size() != traj.size())
    fail(ErrorKind::input, "fold split does not cover the trajectory");
  PreparedData p;
  Matrix sq_x = parallel::symmetric_sq_distances(traj.contexts());
  Matrix sq_y = parallel::symmetric_sq_distances(traj.outcomes());
  p.covariate_lengthscale = resolve_lengthscale_from_sq(kernels.covariate, sq_x, DataRole::covariate);
  p.outcome_lengthscale = resolve_lengthscale_from_sq(kernels.outcome, sq_y, DataRole::outcome);
  p.kx = parallel::gaussian_from_sq(sq_x, p.covariate_lengthscale);
  p.ky = parallel::gaussian_from_sq(sq_y, p.outcome_lengthscale);
  p.actions = traj.actions();
  p.treated = traj.treated_propensities();
  p.fold_propensities = fold_propensity_snapshots(traj, split);
  p.split = split;
  return p;
}

PreparedData swap_arms(const PreparedData& data) {
  PreparedData p = data;
  for (int& a : p.actions) a = 1 - a;
  for (double& t : p.treated) t = 1.0 - t;
  for (auto& m : p.fold_propensities) m = (1.0 - m.array()).matrix();
  return p;
}

PreparedData swap_folds(const PreparedData& data) {
  PreparedData p = data;
  p.split = data.split.swapped();
  std::swap(p.fold_propensities[0], p.fold_propensities[1]);
  return p;
}

namespace {

template <typename T>
std::vector<T> gather(const std::vector<T>& v, const IndexList& idx) {
  std::vector<T> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

Matrix cross_fold_matrix(const PreparedData& data, const FoldArtifacts& f0, const FoldArtifacts& f1) {
  GramBlock k01{f0.logged.basis, f1.logged.basis, submatrix(data.ky, f0.logged.basis, f1.logged.basis)};
  return cross_matrix(f0.logged, k01, f1.logged);
}

}  // namespace

FoldArtifacts build_fold(const PreparedData& data, int r, const TestConfig& config, bool with_weights) {
  const IndexList& rounds = data.split[r];
  std::vector<int> actions = gather(data.actions, rounds);
  std::vector<double> treated = gather(data.treated, rounds);
  Matrix kxx = submatrix(data.kx, rounds, rounds);

  FoldArtifacts f;
  switch (config.nuisance) {
    case NuisanceMode::sequential:
      f.ops = sequential_operators(kxx, actions, config.ridge, rounds);
      break;
    case NuisanceMode::hat:
      f.ops = hat_operators(arm_smoothers(kxx, actions, config.ridge, r), rounds);
      break;
    case NuisanceMode::crossfit: {
      const IndexList& other = data.split[1 - r];
      std::vector<int> other_actions = gather(data.actions, other);
      f.ops = crossfit_operators(submatrix(data.kx, rounds, other), submatrix(data.kx, other, other),
                                 actions, other_actions, config.ridge, rounds, other);
      break;
    }
  }
  f.logged = dr_coefficients(f.ops, ipw_multipliers(actions, treated, config.weights.clip));
  if (!with_weights) return f;
  Matrix kyy = submatrix(data.ky, f.ops.basis, f.ops.basis);
  FoldWeightInputs in{&f.ops, &kyy, actions, treated, &data.fold_propensities[r]};
  f.weights = weight_series(in, config.weights, r);
  return f;
}

double p_value_for(double statistic, Sidedness sidedness) {
  if (sidedness == Sidedness::one_sided) return normal_upper_tail(statistic);
  return std::min(1.0, 2.0 * normal_upper_tail(std::abs(statistic)));
}

TestOutcome vs_dr_kte(const PreparedData& data, const TestConfig& config) {
  FoldArtifacts f0 = build_fold(data, 0, config);
  FoldArtifacts f1 = build_fold(data, 1, config);
  Matrix g0 = cross_fold_matrix(data, f0, f1);
  Matrix g = f0.weights.omega.asDiagonal() * g0 * f1.weights.omega.asDiagonal();

  const double n0 = static_cast<double>(g.rows()), n1 = static_cast<double>(g.cols());
  TestOutcome out;
  out.alpha = config.alpha;
  out.diagnostics.n0 = g.rows();
  out.diagnostics.n1 = g.cols();
  out.diagnostics.numerator = g.sum() / std::sqrt(n0 * n1);
  out.diagnostics.variance_proxy = g.squaredNorm() / (n0 * n1);
  out.diagnostics.warmup_counts = {f0.weights.warmup_count(), f1.weights.warmup_count()};
  out.diagnostics.kte_sq_estimate = g0.mean();
  if (!(out.diagnostics.variance_proxy > 0.0))
    fail(ErrorKind::degenerate_statistic, "stabilized cross matrix is identically zero");
  out.statistic = out.diagnostics.numerator / std::sqrt(out.diagnostics.variance_proxy);
  out.p_value = p_value_for(out.statistic, config.sidedness);
  out.reject = out.p_value < config.alpha;
  return out;
}

TestOutcome vs_dr_kte(const Trajectory& traj, const FoldSplit& split, const TestConfig& config) {
  return vs_dr_kte(prepare(traj, split, config.kernels), config);
}

TestOutcome dr_kte_unstabilized(const PreparedData& data, const TestConfig& config) {
  FoldArtifacts f0 = build_fold(data, 0, config, false);
  FoldArtifacts f1 = build_fold(data, 1, config, false);
  Matrix g0 = cross_fold_matrix(data, f0, f1);
  Vector u = g0.rowwise().mean();
  const double n0 = static_cast<double>(u.size());
  const double mean = u.mean();
  const double var = (u.array() - mean).square().sum() / n0;

  TestOutcome out;
  out.alpha = config.alpha;
  out.diagnostics.n0 = g0.rows();
  out.diagnostics.n1 = g0.cols();
  out.diagnostics.numerator = mean;
  out.diagnostics.variance_proxy = var;
  out.diagnostics.kte_sq_estimate = g0.mean();
  if (!(var > 0.0)) fail(ErrorKind::degenerate_statistic, "row means of the cross matrix are constant");
  out.statistic = std::sqrt(n0) * mean / std::sqrt(var);
  out.p_value = p_value_for(out.statistic, config.sidedness);
  out.reject = out.p_value < config.alpha;
  return out;
}

TestOutcome dr_kte_unstabilized(const Trajectory& traj, const FoldSplit& split, const TestConfig& config) {
  return dr_kte_unstabilized(prepare(traj, split, config.kernels), config);
}

KteEstimate kte_estimate(const PreparedData& data, const TestConfig& config) {
  FoldArtifacts f0 = build_fold(data, 0, config, false);
  FoldArtifacts f1 = build_fold(data, 1, config, false);
  double raw = cross_fold_matrix(data, f0, f1).mean();
  return {raw, std::max(raw, 0.0)};
}

KteEstimate kte_estimate(const Trajectory& traj, const FoldSplit& split, const TestConfig& config) {
  return kte_estimate(prepare(traj, split, config.kernels), config);
}

}  // namespace vskte
