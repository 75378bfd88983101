#pragma once

#include <span>
#include <string>

#include "vskte/kernel.hpp"
#include "vskte/nuisance.hpp"
#include "vskte/types.hpp"

namespace vskte {

inline constexpr double kPropensityClip = 1e-3;

struct IpwMultipliers {
  Vector w;
  Vector source_propensities;
};

double clip_propensity(double p, double clip = kPropensityClip);

// propensities are pi(1|X_i); w_i = 1/p_i for A_i = 1 and -1/(1-p_i) for A_i = 0.
IpwMultipliers ipw_multipliers(std::span<const int> actions, std::span<const double> propensities,
                               double clip = kPropensityClip);

struct DrCoefficients {
  IndexList basis;
  Matrix d;
  std::string provenance = "logged";
};

DrCoefficients dr_coefficients(const FoldSmoothers& s, const IpwMultipliers& w);
DrCoefficients dr_coefficients(const NuisanceOperators& ops, const IpwMultipliers& w,
                               std::string provenance = "logged");

// G0 = D0^T K01 D1, where K01 has rows over D0's basis and columns over D1's.
Matrix cross_matrix(const DrCoefficients& d0, const GramBlock& k01, const DrCoefficients& d1);

// Generic discrete-action score in an explicit outcome feature space:
// 1{A=a}/pi(a|x) * (phi(y) - mu_bar(A,x)) + mu_bar(a,x).
Vector canonical_gradient(int target_arm, int observed_arm, double target_propensity,
                          const Vector& outcome_feature, const Vector& model_at_observed,
                          const Vector& model_at_target);

}  // namespace vskte
