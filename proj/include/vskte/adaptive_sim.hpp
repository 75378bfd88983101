#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vskte/scenarios.hpp"
#include "vskte/split.hpp"
#include "vskte/stabilization.hpp"
#include "vskte/types.hpp"

namespace vskte {

struct LoggedRound {
  std::size_t t = 0;
  Vector x;
  int a = 0;
  Vector y;
  double logged_propensity = 0.5;  // pi_t(a|x) for the realised arm
};

struct TrajectoryMeta {
  std::string policy;
  std::uint64_t seed = 0;
  nlohmann::json env;
};

struct Trajectory {
  std::vector<LoggedRound> rounds;
  std::vector<PolicySnapshot> snapshots;
  TrajectoryMeta meta;

  std::size_t size() const { return rounds.size(); }
  Matrix contexts() const;
  Matrix outcomes() const;
  std::vector<int> actions() const;
  // pi_t(1|X_t) re-evaluated from each round's snapshot.
  std::vector<double> treated_propensities() const;
};

struct EpsGreedyParams {
  double eps0 = 0.2;
  double eps_min = 0.05;
  double power = 0.99;
  double ridge = 1e-2;
};

struct EtcParams {
  std::size_t t0 = 15;
  double epsilon = 1e-3;
};

double epsilon_schedule(std::size_t t, const EpsGreedyParams& p);

// Per-arm online ridge on (1, x) with an unpenalised intercept, solved with a
// pseudo-inverse. The scalar reward is the mean of the outcome vector.
class ArmRidge {
 public:
  ArmRidge(std::size_t d, double ridge);
  void update(std::span<const double> x, double reward);
  const Vector& theta() const { return theta_; }
  double predict(std::span<const double> x) const;
  std::size_t updates() const { return updates_; }

 private:
  Matrix s_;
  Vector b_;
  Vector theta_;
  std::size_t updates_ = 0;
};

Vector pinv_solve(const Matrix& s, const Vector& b, double rcond = 1e-10);
double scalarize(const Vector& y);

Trajectory run_eps_greedy(Environment& env, std::size_t T, const EpsGreedyParams& params,
                          std::uint64_t seed);
Trajectory run_etc(Environment& env, std::size_t T, const EtcParams& params, std::uint64_t seed);
Trajectory run_uniform(Environment& env, std::size_t T, std::uint64_t seed);

// Row k of fold r: pi_{t_k}(1|X_s) for every in-fold s.
std::array<Matrix, 2> fold_propensity_snapshots(const Trajectory& traj, const FoldSplit& split);

// Line-delimited JSON: a leading {"meta": ...} line then one record per round.
void write_jsonl(std::ostream& out, const Trajectory& traj);
Trajectory read_jsonl(std::istream& in);
void save_trajectory(const std::string& path, const Trajectory& traj);
Trajectory load_trajectory(const std::string& path);

}  // namespace vskte
