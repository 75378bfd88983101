#pragma once

#include <span>
#include <string>

#include "vskte/types.hpp"

namespace vskte {

// Zero-padded per-arm kernel ridge hat matrices on one fold, chronological order.
struct FoldSmoothers {
  int fold_id = 0;
  std::size_t n = 0;
  IndexList control_idx;
  IndexList treated_idx;
  Matrix mu0, mu1, mu, residual, delta;
  double ridge = 1e-2;
};

FoldSmoothers arm_smoothers(const Matrix& kxx, std::span<const int> actions, double ridge,
                            int fold_id = 0);

enum class NuisanceMode { sequential, hat, crossfit };

NuisanceMode parse_nuisance_mode(const std::string& name);
const char* to_string(NuisanceMode mode);

// Score coefficients D(w) = delta + residual * diag(w). Columns are the fold's
// rounds in chronological order; rows index `basis`, the rounds whose outcome
// features the coefficients multiply (positions into the full trajectory).
struct NuisanceOperators {
  IndexList basis;
  Matrix delta;
  Matrix residual;
};

NuisanceOperators hat_operators(const FoldSmoothers& s, const IndexList& rounds);

// Column j uses arm-wise ridge fits on the in-fold rounds strictly before j,
// so every score is predictable with respect to the fold's own history.
NuisanceOperators sequential_operators(const Matrix& kxx, std::span<const int> actions, double ridge,
                                       const IndexList& rounds);

// Arm-wise fits on the opposite fold evaluated at this fold's covariates.
// kx_cross is n_own x n_other, kx_other is n_other x n_other.
NuisanceOperators crossfit_operators(const Matrix& kx_cross, const Matrix& kx_other,
                                     std::span<const int> own_actions,
                                     std::span<const int> other_actions, double ridge,
                                     const IndexList& own_rounds, const IndexList& other_rounds);

}  // namespace vskte
