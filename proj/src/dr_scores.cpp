#include "vskte/dr_scores.hpp"

#include <algorithm>
#include <cmath>

#include "vskte/errors.hpp"

namespace vskte {

double clip_propensity(double p, double clip) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::input, "propensity outside (0, 1)");
  return std::clamp(p, clip, 1.0 - clip);
}

IpwMultipliers ipw_multipliers(std::span<const int> actions, std::span<const double> propensities,
                               double clip) {
  if (actions.size() != propensities.size())
    fail(ErrorKind::input, "ipw_multipliers: actions and propensities differ in length");
  IpwMultipliers out;
  out.w.resize(actions.size());
  out.source_propensities.resize(actions.size());
  for (std::size_t i = 0; i < actions.size(); ++i) {
    double p = clip_propensity(propensities[i], clip);
    out.source_propensities(i) = p;
    out.w(i) = actions[i] == 1 ? 1.0 / p : -1.0 / (1.0 - p);
  }
  return out;
}

DrCoefficients dr_coefficients(const FoldSmoothers& s, const IpwMultipliers& w) {
  IndexList basis(s.n);
  for (std::size_t i = 0; i < s.n; ++i) basis[i] = i;
  return dr_coefficients(NuisanceOperators{basis, s.delta, s.residual}, w);
}

DrCoefficients dr_coefficients(const NuisanceOperators& ops, const IpwMultipliers& w,
                               std::string provenance) {
  if (ops.delta.cols() != w.w.size() || ops.residual.cols() != w.w.size())
    fail(ErrorKind::input, "dr_coefficients: multiplier length does not match fold size");
  DrCoefficients d;
  d.basis = ops.basis;
  d.d = ops.delta + ops.residual * w.w.asDiagonal();
  d.provenance = std::move(provenance);
  return d;
}

Matrix cross_matrix(const DrCoefficients& d0, const GramBlock& k01, const DrCoefficients& d1) {
  if (k01.values.rows() != d0.d.rows() || k01.values.cols() != d1.d.rows())
    fail(ErrorKind::input, "cross_matrix: Gram block does not match coefficient bases");
  return d0.d.transpose() * k01.values * d1.d;
}

Vector canonical_gradient(int target_arm, int observed_arm, double target_propensity,
                          const Vector& outcome_feature, const Vector& model_at_observed,
                          const Vector& model_at_target) {
  if (outcome_feature.size() != model_at_observed.size() ||
      outcome_feature.size() != model_at_target.size())
    fail(ErrorKind::input, "canonical_gradient: feature dimension mismatch");
  if (!(target_propensity > 0.0)) fail(ErrorKind::input, "canonical_gradient: propensity must be positive");
  Vector out = model_at_target;
  if (observed_arm == target_arm) out += (outcome_feature - model_at_observed) / target_propensity;
  return out;
}

}  // namespace vskte
