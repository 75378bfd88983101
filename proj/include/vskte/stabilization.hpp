#pragma once

#include <span>
#include <string>
#include <vector>

#include "vskte/dr_scores.hpp"
#include "vskte/nuisance.hpp"
#include "vskte/types.hpp"

namespace vskte {

// Epsilon-greedy state before the round-t update.
struct PolicySnapshot {
  std::size_t t = 0;
  Vector theta0;
  Vector theta1;
  double epsilon = 0.0;

  // pi_t(1|x) with features (1, x).
  double treated_propensity(std::span<const double> x) const;
};

// rho_s = pi_t(A_s|X_s) / pi_s(A_s|X_s), both given as treated propensities.
Vector importance_ratios(std::span<const double> eval_treated, std::span<const double> logged_treated,
                         std::span<const int> actions);
Vector importance_ratios(const PolicySnapshot& snapshot, const Matrix& past_contexts,
                         std::span<const double> logged_treated, std::span<const int> actions);

struct Moments {
  double m1_sq = 0.0;
  double m2 = 0.0;
};

// Direct evaluation: columns of d_t.d restricted to the support of u.
Moments conditional_moments(const DrCoefficients& d_t, const Matrix& kyy, const Vector& u);

// Cached quadratic forms so each (s, t) pair costs O(1) plus one O(basis * past)
// product per t for the first moment.
class MomentCache {
 public:
  MomentCache(const NuisanceOperators& ops, const Matrix& kyy);

  // w holds time-t multipliers for the first `past` columns; u the weights.
  Moments evaluate(std::size_t past, const Vector& w, const Vector& u) const;

 private:
  const NuisanceOperators* ops_;
  Matrix k_delta_;
  Matrix k_residual_;
  Vector v_dd_, v_dr_, v_rr_;
};

double stabilization_weight(double m1_sq, double m2, double variance_floor, double omega_max);

enum class MomentNormalization { count, self };
enum class WarmupPolicy { exclude, unit };

struct WeightConfig {
  std::size_t warmup_min = 20;
  WarmupPolicy warmup = WarmupPolicy::exclude;
  MomentNormalization normalization = MomentNormalization::count;
  double variance_floor = 1e-12;
  double omega_max = 1e6;
  double clip = kPropensityClip;
};

MomentNormalization parse_normalization(const std::string& name);
WarmupPolicy parse_warmup_policy(const std::string& name);
const char* to_string(MomentNormalization n);
const char* to_string(WarmupPolicy w);

struct StabilizationWeights {
  int fold_id = 0;
  Vector omega;
  std::vector<bool> warmup_mask;
  double omega_max = 1e6;

  std::size_t warmup_count() const;
};

// Everything a fold needs to compute its weight series.
struct FoldWeightInputs {
  const NuisanceOperators* ops = nullptr;
  const Matrix* kyy = nullptr;  // basis x basis
  std::span<const int> actions;
  std::span<const double> logged_treated;  // pi_s(1|X_s)
  const Matrix* eval_treated = nullptr;    // row k: pi_{t_k}(1|X_s) for all in-fold s
};

// Warmup rounds get weight 0 (excluded) or 1 depending on config.warmup.
StabilizationWeights weight_series(const FoldWeightInputs& in, const WeightConfig& config,
                                   int fold_id = 0);

// Normalized past weights for in-fold position k.
Vector past_weights(const Vector& rho, MomentNormalization normalization);

// Time-t multipliers for past rounds s < k.
Vector time_t_multipliers(const FoldWeightInputs& in, std::size_t k, double clip);

}  // namespace vskte
