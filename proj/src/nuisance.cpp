#include "vskte/nuisance.hpp"

#include <cmath>

#include "vskte/errors.hpp"

namespace vskte {

NuisanceMode parse_nuisance_mode(const std::string& name) {
  if (name == "sequential") return NuisanceMode::sequential;
  if (name == "hat") return NuisanceMode::hat;
  if (name == "crossfit") return NuisanceMode::crossfit;
  fail(ErrorKind::input, "unknown nuisance mode '" + name + "' (sequential, hat, crossfit)");
}

const char* to_string(NuisanceMode mode) {
  switch (mode) {
    case NuisanceMode::sequential: return "sequential";
    case NuisanceMode::hat: return "hat";
    case NuisanceMode::crossfit: return "crossfit";
  }
  return "?";
}

namespace {

IndexList arm_positions(std::span<const int> actions, int arm) {
  IndexList idx;
  for (std::size_t i = 0; i < actions.size(); ++i)
    if (actions[i] == arm) idx.push_back(i);
  return idx;
}

// (K[idx, idx] + ridge I)^{-1} rhs, where rhs has one row per idx entry.
Matrix ridge_solve(const Matrix& k, const IndexList& idx, double ridge, const Matrix& rhs) {
  const std::size_t m = idx.size();
  Eigen::MatrixXd a(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) a(i, j) = k(idx[i], idx[j]);
  a.diagonal().array() += ridge;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) fail(ErrorKind::numerical, "ridge system is not positive definite");
  return llt.solve(Eigen::MatrixXd(rhs));
}

void check_ridge(double ridge) {
  if (!(ridge > 0.0)) fail(ErrorKind::input, "ridge parameter must be positive");
}

}  // namespace

FoldSmoothers arm_smoothers(const Matrix& kxx, std::span<const int> actions, double ridge, int fold_id) {
  check_ridge(ridge);
  const std::size_t n = actions.size();
  if (static_cast<std::size_t>(kxx.rows()) != n || static_cast<std::size_t>(kxx.cols()) != n)
    fail(ErrorKind::input, "arm_smoothers: Gram size does not match actions");
  FoldSmoothers s;
  s.fold_id = fold_id;
  s.n = n;
  s.ridge = ridge;
  s.control_idx = arm_positions(actions, 0);
  s.treated_idx = arm_positions(actions, 1);
  if (s.control_idx.empty() || s.treated_idx.empty())
    fail(ErrorKind::degenerate_fold, "fold " + std::to_string(fold_id) + " is missing an arm");

  auto smoother = [&](const IndexList& idx) {
    Matrix rhs(idx.size(), n);
    for (std::size_t j = 0; j < idx.size(); ++j) rhs.row(j) = kxx.row(idx[j]);
    Matrix z = ridge_solve(kxx, idx, ridge, rhs);
    Matrix mu = Matrix::Zero(n, n);
    for (std::size_t j = 0; j < idx.size(); ++j) mu.col(idx[j]) = z.row(j).transpose();
    return mu;
  };
  s.mu0 = smoother(s.control_idx);
  s.mu1 = smoother(s.treated_idx);
  s.mu = s.mu0 + s.mu1;
  s.residual = Matrix::Identity(n, n) - s.mu;
  s.delta = s.mu1 - s.mu0;
  return s;
}

NuisanceOperators hat_operators(const FoldSmoothers& s, const IndexList& rounds) {
  if (rounds.size() != s.n) fail(ErrorKind::input, "hat_operators: round list size mismatch");
  return {rounds, s.delta, s.residual};
}

namespace {

// Growing Cholesky factor of K[past, past] + ridge I for one arm.
class IncrementalCholesky {
 public:
  explicit IncrementalCholesky(std::size_t capacity) : l_(Matrix::Zero(capacity, capacity)) {}

  std::size_t size() const { return past_.size(); }
  const IndexList& past() const { return past_; }

  // Forward solve L z = k for the current past set.
  Vector forward(const Vector& k) const {
    const auto m = static_cast<Eigen::Index>(past_.size());
    return l_.topLeftCorner(m, m).triangularView<Eigen::Lower>().solve(k);
  }

  Vector backward(const Vector& z) const {
    const auto m = static_cast<Eigen::Index>(past_.size());
    return l_.topLeftCorner(m, m).transpose().triangularView<Eigen::Upper>().solve(z);
  }

  void append(std::size_t pos, const Vector& z, double diag_entry) {
    const auto m = static_cast<Eigen::Index>(past_.size());
    double pivot = diag_entry - z.squaredNorm();
    if (!(pivot > 0.0)) fail(ErrorKind::numerical, "sequential ridge factor lost definiteness");
    if (m > 0) l_.row(m).head(m) = z.transpose();
    l_(m, m) = std::sqrt(pivot);
    past_.push_back(pos);
  }

 private:
  Matrix l_;
  IndexList past_;
};

}  // namespace

NuisanceOperators sequential_operators(const Matrix& kxx, std::span<const int> actions, double ridge,
                                       const IndexList& rounds) {
  check_ridge(ridge);
  const std::size_t n = actions.size();
  if (static_cast<std::size_t>(kxx.rows()) != n || rounds.size() != n)
    fail(ErrorKind::input, "sequential_operators: size mismatch");
  if (arm_positions(actions, 0).empty() || arm_positions(actions, 1).empty())
    fail(ErrorKind::degenerate_fold, "fold is missing an arm");

  NuisanceOperators ops{rounds, Matrix::Zero(n, n), Matrix::Identity(n, n)};
  IncrementalCholesky chol[2] = {IncrementalCholesky(n), IncrementalCholesky(n)};
  for (std::size_t j = 0; j < n; ++j) {
    Vector z_own;
    for (int arm = 0; arm < 2; ++arm) {
      const IndexList& past = chol[arm].past();
      Vector k(past.size());
      for (std::size_t i = 0; i < past.size(); ++i) k(i) = kxx(past[i], j);
      Vector z = chol[arm].forward(k);
      if (!past.empty()) {
        Vector beta = chol[arm].backward(z);
        const double sign = arm == 1 ? 1.0 : -1.0;
        for (std::size_t i = 0; i < past.size(); ++i) {
          ops.delta(past[i], j) += sign * beta(i);
          if (actions[j] == arm) ops.residual(past[i], j) -= beta(i);
        }
      }
      if (actions[j] == arm) z_own = std::move(z);
    }
    const int a = actions[j];
    chol[a].append(j, z_own, kxx(j, j) + ridge);
  }
  return ops;
}

NuisanceOperators crossfit_operators(const Matrix& kx_cross, const Matrix& kx_other,
                                     std::span<const int> own_actions,
                                     std::span<const int> other_actions, double ridge,
                                     const IndexList& own_rounds, const IndexList& other_rounds) {
  check_ridge(ridge);
  const std::size_t n = own_actions.size(), m = other_actions.size();
  if (static_cast<std::size_t>(kx_cross.rows()) != n || static_cast<std::size_t>(kx_cross.cols()) != m ||
      static_cast<std::size_t>(kx_other.rows()) != m || own_rounds.size() != n || other_rounds.size() != m)
    fail(ErrorKind::input, "crossfit_operators: size mismatch");

  NuisanceOperators ops;
  ops.basis = own_rounds;
  ops.basis.insert(ops.basis.end(), other_rounds.begin(), other_rounds.end());
  ops.delta = Matrix::Zero(n + m, n);
  ops.residual = Matrix::Zero(n + m, n);
  ops.residual.topRows(n).setIdentity();

  for (int arm = 0; arm < 2; ++arm) {
    IndexList idx = arm_positions(other_actions, arm);
    if (idx.empty()) fail(ErrorKind::degenerate_fold, "opposite fold is missing an arm");
    Matrix rhs(idx.size(), n);
    for (std::size_t j = 0; j < idx.size(); ++j) rhs.row(j) = kx_cross.col(idx[j]).transpose();
    Matrix coef = ridge_solve(kx_other, idx, ridge, rhs);
    const double sign = arm == 1 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      ops.delta.row(n + idx[j]) += sign * coef.row(j);
      for (std::size_t i = 0; i < n; ++i)
        if (own_actions[i] == arm) ops.residual(n + idx[j], i) -= coef(j, i);
    }
  }
  return ops;
}

}  // namespace vskte
