#include "vskte/stabilization.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "vskte/errors.hpp"

namespace vskte {

double PolicySnapshot::treated_propensity(std::span<const double> x) const {
  if (static_cast<std::size_t>(theta0.size()) != x.size() + 1 ||
      static_cast<std::size_t>(theta1.size()) != x.size() + 1)
    fail(ErrorKind::input, "snapshot dimension does not match context");
  double q0 = theta0(0), q1 = theta1(0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    q0 += theta0(i + 1) * x[i];
    q1 += theta1(i + 1) * x[i];
  }
  if (q1 > q0) return 1.0 - epsilon / 2.0;
  if (q1 < q0) return epsilon / 2.0;
  return 0.5;
}

Vector importance_ratios(std::span<const double> eval_treated, std::span<const double> logged_treated,
                         std::span<const int> actions) {
  if (eval_treated.size() != actions.size() || logged_treated.size() != actions.size())
    fail(ErrorKind::input, "importance_ratios: length mismatch");
  Vector rho(actions.size());
  for (std::size_t s = 0; s < actions.size(); ++s) {
    double num = clip_propensity(eval_treated[s]);
    double den = clip_propensity(logged_treated[s]);
    rho(s) = actions[s] == 1 ? num / den : (1.0 - num) / (1.0 - den);
  }
  return rho;
}

Vector importance_ratios(const PolicySnapshot& snapshot, const Matrix& past_contexts,
                         std::span<const double> logged_treated, std::span<const int> actions) {
  std::vector<double> eval(past_contexts.rows());
  for (Eigen::Index s = 0; s < past_contexts.rows(); ++s)
    eval[s] = snapshot.treated_propensity(
        std::span<const double>(past_contexts.row(s).data(), past_contexts.cols()));
  return importance_ratios(eval, logged_treated, actions);
}

Moments conditional_moments(const DrCoefficients& d_t, const Matrix& kyy, const Vector& u) {
  const Eigen::Index k = u.size();
  if (k > d_t.d.cols() || kyy.rows() != d_t.d.rows())
    fail(ErrorKind::input, "conditional_moments: dimension mismatch");
  Moments m;
  Vector a = d_t.d.leftCols(k) * u;
  m.m1_sq = a.dot(kyy * a);
  for (Eigen::Index s = 0; s < k; ++s) {
    Vector ds = d_t.d.col(s);
    m.m2 += u(s) * ds.dot(kyy * ds);
  }
  return m;
}

MomentCache::MomentCache(const NuisanceOperators& ops, const Matrix& kyy) : ops_(&ops) {
  if (kyy.rows() != ops.delta.rows() || kyy.cols() != ops.delta.rows())
    fail(ErrorKind::input, "MomentCache: Gram does not match operator basis");
  k_delta_ = kyy * ops.delta;
  k_residual_ = kyy * ops.residual;
  const Eigen::Index n = ops.delta.cols();
  v_dd_.resize(n);
  v_dr_.resize(n);
  v_rr_.resize(n);
  for (Eigen::Index s = 0; s < n; ++s) {
    v_dd_(s) = ops.delta.col(s).dot(k_delta_.col(s));
    v_dr_(s) = ops.delta.col(s).dot(k_residual_.col(s));
    v_rr_(s) = ops.residual.col(s).dot(k_residual_.col(s));
  }
}

Moments MomentCache::evaluate(std::size_t past, const Vector& w, const Vector& u) const {
  const auto k = static_cast<Eigen::Index>(past);
  if (w.size() != k || u.size() != k || k > ops_->delta.cols())
    fail(ErrorKind::input, "MomentCache::evaluate: dimension mismatch");
  Vector wu = w.cwiseProduct(u);
  Vector a = ops_->delta.leftCols(k) * u + ops_->residual.leftCols(k) * wu;
  Vector ka = k_delta_.leftCols(k) * u + k_residual_.leftCols(k) * wu;
  Moments m;
  m.m1_sq = a.dot(ka);
  for (Eigen::Index s = 0; s < k; ++s)
    m.m2 += u(s) * (v_dd_(s) + 2.0 * w(s) * v_dr_(s) + w(s) * w(s) * v_rr_(s));
  return m;
}

double stabilization_weight(double m1_sq, double m2, double variance_floor, double omega_max) {
  if (!std::isfinite(m1_sq) || !std::isfinite(m2))
    fail(ErrorKind::numerical, "non-finite conditional moments");
  double omega = 1.0 / std::sqrt(std::max(m2 - m1_sq, variance_floor));
  return std::min(omega, omega_max);
}

MomentNormalization parse_normalization(const std::string& name) {
  if (name == "count") return MomentNormalization::count;
  if (name == "self") return MomentNormalization::self;
  fail(ErrorKind::input, "unknown moment normalization '" + name + "' (count, self)");
}

WarmupPolicy parse_warmup_policy(const std::string& name) {
  if (name == "exclude") return WarmupPolicy::exclude;
  if (name == "unit") return WarmupPolicy::unit;
  fail(ErrorKind::input, "unknown warmup policy '" + name + "' (exclude, unit)");
}

const char* to_string(MomentNormalization n) { return n == MomentNormalization::count ? "count" : "self"; }
const char* to_string(WarmupPolicy w) { return w == WarmupPolicy::exclude ? "exclude" : "unit"; }

std::size_t StabilizationWeights::warmup_count() const {
  return static_cast<std::size_t>(std::count(warmup_mask.begin(), warmup_mask.end(), true));
}

Vector past_weights(const Vector& rho, MomentNormalization normalization) {
  if (rho.size() == 0) return rho;
  double denom = normalization == MomentNormalization::count ? static_cast<double>(rho.size()) : rho.sum();
  return rho / denom;
}

Vector time_t_multipliers(const FoldWeightInputs& in, std::size_t k, double clip) {
  Vector w(k);
  for (std::size_t s = 0; s < k; ++s) {
    double p = clip_propensity((*in.eval_treated)(k, s), clip);
    w(s) = in.actions[s] == 1 ? 1.0 / p : -1.0 / (1.0 - p);
  }
  return w;
}

namespace {

void check_inputs(const FoldWeightInputs& in) {
  const auto n = static_cast<Eigen::Index>(in.actions.size());
  if (!in.ops || !in.kyy || !in.eval_treated) fail(ErrorKind::input, "weight_series: missing inputs");
  if (in.eval_treated->rows() != n || in.eval_treated->cols() != n)
    fail(ErrorKind::input, "weight_series: snapshot count does not match fold size");
  if (static_cast<Eigen::Index>(in.logged_treated.size()) != n || in.ops->delta.cols() != n)
    fail(ErrorKind::input, "weight_series: fold size mismatch");
  // Validated up front so nothing throws inside the parallel loop.
  auto valid = [](double p) { return p > 0.0 && p < 1.0; };
  for (double p : in.logged_treated)
    if (!valid(p)) fail(ErrorKind::input, "weight_series: logged propensity outside (0, 1)");
  for (Eigen::Index i = 0; i < in.eval_treated->size(); ++i)
    if (!valid(in.eval_treated->data()[i]))
      fail(ErrorKind::input, "weight_series: snapshot propensity outside (0, 1)");
}

Vector ratios_at(const FoldWeightInputs& in, std::size_t k) {
  std::span<const double> eval(in.eval_treated->row(k).data(), k);
  return importance_ratios(eval, in.logged_treated.subspan(0, k), in.actions.subspan(0, k));
}

}  // namespace

StabilizationWeights weight_series(const FoldWeightInputs& in, const WeightConfig& config, int fold_id) {
  check_inputs(in);
  const std::size_t n = in.actions.size();
  const std::size_t warmup = std::max<std::size_t>(config.warmup_min, 1);
  MomentCache cache(*in.ops, *in.kyy);

  StabilizationWeights out;
  out.fold_id = fold_id;
  out.omega_max = config.omega_max;
  out.omega = Vector::Zero(n);
  std::vector<char> mask(n, 0);
  std::atomic<bool> bad{false};

#pragma omp parallel for schedule(dynamic, 8)
  for (std::size_t k = 0; k < n; ++k) {
    if (k < warmup) {
      mask[k] = 1;
      out.omega(k) = config.warmup == WarmupPolicy::unit ? 1.0 : 0.0;
      continue;
    }
    Vector u = past_weights(ratios_at(in, k), config.normalization);
    Moments m = cache.evaluate(k, time_t_multipliers(in, k, config.clip), u);
    if (!std::isfinite(m.m1_sq) || !std::isfinite(m.m2)) {
      bad = true;
      continue;
    }
    out.omega(k) = stabilization_weight(m.m1_sq, m.m2, config.variance_floor, config.omega_max);
  }
  if (bad) fail(ErrorKind::numerical, "non-finite conditional moments");
  out.warmup_mask.assign(mask.begin(), mask.end());
  return out;
}

}  // namespace vskte
