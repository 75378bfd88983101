#pragma once

#include <functional>
#include <string>

#include "vskte/adaptive_sim.hpp"
#include "vskte/stabilization.hpp"

namespace vskte {

enum class BaselineMethod { cadr, aw_aipw_constant, aw_aipw_two_point };

const char* to_string(BaselineMethod m);

struct ScalarTestOutcome {
  double estimate = 0.0;
  double statistic = 0.0;
  double p_value = 1.0;
  bool reject = false;
  BaselineMethod method = BaselineMethod::cadr;
};

struct CadrConfig {
  double ridge = 1e-2;
  WeightConfig weights;
  double alpha = 0.05;
};

// Vector outcomes are reduced to their mean before either baseline runs.
ScalarTestOutcome cadr_ate_test(const Trajectory& traj, const CadrConfig& config);

enum class Allocation { constant, two_point };

// Returns the allocation fraction lambda_t for 1-based round t given e_t.
using AllocationForecast = std::function<double(std::size_t t, std::size_t T, double e_t)>;

ScalarTestOutcome aw_aipw_test(const Trajectory& traj, Allocation allocation = Allocation::constant,
                               double alpha = 0.05,
                               const AllocationForecast& forecast = {});

// Stick-breaking evaluation weights h_t for one arm from its propensities e_t.
Vector allocation_weights(const Vector& e, Allocation allocation,
                          const AllocationForecast& forecast = {});

}  // namespace vskte
