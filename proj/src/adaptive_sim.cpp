#include "vskte/adaptive_sim.hpp"

#include <cmath>
#include <limits>

#include "vskte/errors.hpp"

namespace vskte {

Matrix Trajectory::contexts() const {
  if (rounds.empty()) return Matrix();
  Matrix m(rounds.size(), rounds.front().x.size());
  for (std::size_t t = 0; t < rounds.size(); ++t) m.row(t) = rounds[t].x.transpose();
  return m;
}

Matrix Trajectory::outcomes() const {
  if (rounds.empty()) return Matrix();
  Matrix m(rounds.size(), rounds.front().y.size());
  for (std::size_t t = 0; t < rounds.size(); ++t) m.row(t) = rounds[t].y.transpose();
  return m;
}

std::vector<int> Trajectory::actions() const {
  std::vector<int> a(rounds.size());
  for (std::size_t t = 0; t < rounds.size(); ++t) a[t] = rounds[t].a;
  return a;
}

std::vector<double> Trajectory::treated_propensities() const {
  if (snapshots.size() != rounds.size()) fail(ErrorKind::input, "trajectory is missing policy snapshots");
  std::vector<double> p(rounds.size());
  for (std::size_t t = 0; t < rounds.size(); ++t)
    p[t] = snapshots[t].treated_propensity(std::span<const double>(rounds[t].x.data(), rounds[t].x.size()));
  return p;
}

double epsilon_schedule(std::size_t t, const EpsGreedyParams& p) {
  return std::max(p.eps_min, p.eps0 / std::pow(static_cast<double>(t) + 1.0, p.power));
}

Vector pinv_solve(const Matrix& s, const Vector& b, double rcond) {
  const Eigen::MatrixXd dense = s;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
  const Vector& vals = eig.eigenvalues();
  const double cutoff = rcond * vals.cwiseAbs().maxCoeff();
  Vector proj = eig.eigenvectors().transpose() * b;
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    proj(i) = std::abs(vals(i)) > cutoff ? proj(i) / vals(i) : 0.0;
  return eig.eigenvectors() * proj;
}

double scalarize(const Vector& y) { return y.mean(); }

ArmRidge::ArmRidge(std::size_t d, double ridge)
    : s_(Matrix::Zero(d + 1, d + 1)), b_(Vector::Zero(d + 1)), theta_(Vector::Zero(d + 1)) {
  for (std::size_t i = 1; i <= d; ++i) s_(i, i) = ridge;
}

void ArmRidge::update(std::span<const double> x, double reward) {
  Vector z(x.size() + 1);
  z(0) = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) z(i + 1) = x[i];
  s_ += z * z.transpose();
  b_ += reward * z;
  theta_ = pinv_solve(s_, b_);
  ++updates_;
}

double ArmRidge::predict(std::span<const double> x) const {
  double q = theta_(0);
  for (std::size_t i = 0; i < x.size(); ++i) q += theta_(i + 1) * x[i];
  return q;
}

namespace {

std::span<const double> as_span(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

void check_horizon(std::size_t T) {
  if (T < 1) fail(ErrorKind::input, "horizon T must be at least 1");
}

// Samples the arm from the snapshot and records the round.
void log_round(Trajectory& traj, PolicySnapshot snap, PotentialOutcomes po, Rng& rng) {
  const double p1 = snap.treated_propensity(as_span(po.x));
  const int a = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p1 ? 1 : 0;
  LoggedRound r;
  r.t = snap.t;
  r.a = a;
  r.y = a == 1 ? std::move(po.y1) : std::move(po.y0);
  r.x = std::move(po.x);
  r.logged_propensity = a == 1 ? p1 : 1.0 - p1;
  traj.rounds.push_back(std::move(r));
  traj.snapshots.push_back(std::move(snap));
}

}  // namespace

Trajectory run_eps_greedy(Environment& env, std::size_t T, const EpsGreedyParams& params,
                          std::uint64_t seed) {
  check_horizon(T);
  if (!(params.eps0 > 0.0 && params.eps0 < 1.0) || !(params.eps_min > 0.0 && params.eps_min < 1.0) ||
      !(params.ridge > 0.0))
    fail(ErrorKind::input, "invalid epsilon-greedy parameters");
  const std::size_t d = env.context_dim();
  ArmRidge arms[2] = {ArmRidge(d, params.ridge), ArmRidge(d, params.ridge)};
  Rng rng(seed);
  Trajectory traj;
  traj.meta = {"eps_greedy", seed, env.descriptor()};
  for (std::size_t t = 0; t < T; ++t) {
    PolicySnapshot snap{t, arms[0].theta(), arms[1].theta(), epsilon_schedule(t, params)};
    log_round(traj, std::move(snap), env.draw(), rng);
    const LoggedRound& r = traj.rounds.back();
    arms[r.a].update(as_span(r.x), scalarize(r.y));
  }
  return traj;
}

Trajectory run_etc(Environment& env, std::size_t T, const EtcParams& params, std::uint64_t seed) {
  check_horizon(T);
  if (params.t0 < 1 || params.t0 >= T) fail(ErrorKind::input, "ETC needs 1 <= t0 < T");
  if (!(params.epsilon > 0.0 && params.epsilon < 0.5)) fail(ErrorKind::input, "ETC epsilon must lie in (0, 0.5)");
  const std::size_t d = env.context_dim();
  Rng rng(seed);
  Trajectory traj;
  traj.meta = {"etc", seed, env.descriptor()};
  const Vector zero = Vector::Zero(d + 1);
  Vector commit0 = zero, commit1 = zero;
  for (std::size_t t = 0; t < T; ++t) {
    if (t == params.t0) {
      double sum[2] = {0.0, 0.0};
      std::size_t count[2] = {0, 0};
      for (const LoggedRound& r : traj.rounds) {
        sum[r.a] += r.y(0);
        ++count[r.a];
      }
      const double lowest = -std::numeric_limits<double>::infinity();
      double mean0 = count[0] ? sum[0] / count[0] : lowest;
      double mean1 = count[1] ? sum[1] / count[1] : lowest;
      // The committed arm gets a unit intercept so it always scores higher.
      (mean1 > mean0 ? commit1 : commit0)(0) = 1.0;
    }
    PolicySnapshot snap = t < params.t0 ? PolicySnapshot{t, zero, zero, 2.0 * params.epsilon}
                                        : PolicySnapshot{t, commit0, commit1, 2.0 * params.epsilon};
    log_round(traj, std::move(snap), env.draw(), rng);
  }
  return traj;
}

Trajectory run_uniform(Environment& env, std::size_t T, std::uint64_t seed) {
  check_horizon(T);
  const Vector zero = Vector::Zero(env.context_dim() + 1);
  Rng rng(seed);
  Trajectory traj;
  traj.meta = {"uniform", seed, env.descriptor()};
  for (std::size_t t = 0; t < T; ++t) log_round(traj, PolicySnapshot{t, zero, zero, 0.5}, env.draw(), rng);
  return traj;
}

std::array<Matrix, 2> fold_propensity_snapshots(const Trajectory& traj, const FoldSplit& split) {
  if (traj.snapshots.size() != traj.rounds.size())
    fail(ErrorKind::input, "trajectory is missing policy snapshots");
  const auto d = traj.rounds.empty() ? 0 : traj.rounds.front().x.size();
  for (std::size_t t = 0; t < traj.size(); ++t)
    if (traj.rounds[t].x.size() != d || traj.snapshots[t].theta0.size() != d + 1 ||
        traj.snapshots[t].theta1.size() != d + 1)
      fail(ErrorKind::input, "snapshot dimension does not match contexts at round " + std::to_string(t));
  std::array<Matrix, 2> out;
  for (int r = 0; r < 2; ++r) {
    const IndexList& idx = split[r];
    const auto n = static_cast<Eigen::Index>(idx.size());
    out[r].resize(n, n);
#pragma omp parallel for schedule(static)
    for (Eigen::Index k = 0; k < n; ++k) {
      const PolicySnapshot& snap = traj.snapshots[idx[k]];
      for (Eigen::Index s = 0; s < n; ++s) out[r](k, s) = snap.treated_propensity(as_span(traj.rounds[idx[s]].x));
    }
  }
  return out;
}

}  // namespace vskte
