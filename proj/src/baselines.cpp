#include "vskte/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "vskte/errors.hpp"
#include "vskte/normal.hpp"

namespace vskte {

const char* to_string(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::cadr: return "cadr";
    case BaselineMethod::aw_aipw_constant: return "aw-aipw";
    case BaselineMethod::aw_aipw_two_point: return "aw-aipw-two-point";
  }
  return "?";
}

namespace {

std::span<const double> as_span(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

double two_sided(double z) { return std::min(1.0, 2.0 * normal_upper_tail(std::abs(z))); }

double multiplier(int a, double p1) { return a == 1 ? 1.0 / p1 : -1.0 / (1.0 - p1); }

}  // namespace

ScalarTestOutcome cadr_ate_test(const Trajectory& traj, const CadrConfig& config) {
  const std::size_t T = traj.size();
  if (T < 2) fail(ErrorKind::input, "CADR needs at least 2 rounds");
  const std::size_t d = traj.rounds.front().x.size();
  const std::size_t warmup = std::max<std::size_t>(config.weights.warmup_min, 1);
  std::vector<double> y(T), p1(T);
  const std::vector<double> treated = traj.treated_propensities();
  for (std::size_t t = 0; t < T; ++t) {
    y[t] = scalarize(traj.rounds[t].y);
    p1[t] = clip_propensity(treated[t], config.weights.clip);
  }

  ArmRidge arms[2] = {ArmRidge(d, config.ridge), ArmRidge(d, config.ridge)};
  // Predictions made before each round's own update, so past residuals are out of sample.
  std::vector<double> prior_q0(T), prior_q1(T);
  double weighted_sum = 0.0, weight_total = 0.0;
  std::size_t included = 0;
  for (std::size_t t = 0; t < T; ++t) {
    const LoggedRound& r = traj.rounds[t];
    const double q1 = arms[1].predict(as_span(r.x)), q0 = arms[0].predict(as_span(r.x));
    prior_q0[t] = q0;
    prior_q1[t] = q1;
    const double score = q1 - q0 + multiplier(r.a, p1[t]) * (y[t] - (r.a == 1 ? q1 : q0));

    double omega;
    if (t < warmup) {
      omega = config.weights.warmup == WarmupPolicy::unit ? 1.0 : 0.0;
    } else {
      const PolicySnapshot& snap = traj.snapshots[t];
      Vector rho(t), past_scores(t);
      for (std::size_t s = 0; s < t; ++s) {
        const LoggedRound& past = traj.rounds[s];
        const double e = clip_propensity(snap.treated_propensity(as_span(past.x)), config.weights.clip);
        rho(s) = past.a == 1 ? e / p1[s] : (1.0 - e) / (1.0 - p1[s]);
        const double pq1 = prior_q1[s], pq0 = prior_q0[s];
        past_scores(s) = pq1 - pq0 + multiplier(past.a, e) * (y[s] - (past.a == 1 ? pq1 : pq0));
      }
      // Self-normalized so the scalar variance estimate is a proper weighted variance.
      Vector u = past_weights(rho, MomentNormalization::self);
      const double m1 = u.dot(past_scores);
      const double m2 = u.dot(past_scores.cwiseAbs2());
      omega = stabilization_weight(m1 * m1, m2, config.weights.variance_floor, config.weights.omega_max);
    }
    if (omega > 0.0) ++included;
    weighted_sum += omega * score;
    weight_total += omega;
    arms[r.a].update(as_span(r.x), y[t]);
  }

  ScalarTestOutcome out;
  out.method = BaselineMethod::cadr;
  if (included == 0) fail(ErrorKind::degenerate_statistic, "CADR has no rounds past warmup");
  out.estimate = weighted_sum / weight_total;
  out.statistic = weighted_sum / std::sqrt(static_cast<double>(included));
  out.p_value = two_sided(out.statistic);
  out.reject = out.p_value < config.alpha;
  return out;
}

Vector allocation_weights(const Vector& e, Allocation allocation, const AllocationForecast& forecast) {
  const auto T = static_cast<std::size_t>(e.size());
  Vector h(T);
  double remaining = 1.0;
  for (std::size_t i = 0; i < T; ++i) {
    const std::size_t t = i + 1;
    double lambda = 1.0 / static_cast<double>(T - t + 1);
    if (allocation == Allocation::two_point && forecast) lambda = std::clamp(forecast(t, T, e(i)), 0.0, 1.0);
    h(i) = std::sqrt(std::max(lambda * remaining * e(i), 0.0));
    remaining *= 1.0 - lambda;
  }
  return h;
}

ScalarTestOutcome aw_aipw_test(const Trajectory& traj, Allocation allocation, double alpha,
                               const AllocationForecast& forecast) {
  const std::size_t T = traj.size();
  if (T < 2) fail(ErrorKind::input, "AW-AIPW needs at least 2 rounds");
  const std::vector<double> treated = traj.treated_propensities();
  Vector gamma[2] = {Vector(T), Vector(T)};
  Vector e[2] = {Vector(T), Vector(T)};
  double sum[2] = {0.0, 0.0};
  std::size_t count[2] = {0, 0};
  for (std::size_t t = 0; t < T; ++t) {
    const LoggedRound& r = traj.rounds[t];
    const double y = scalarize(r.y);
    const double p1 = clip_propensity(treated[t]);
    for (int a = 0; a < 2; ++a) {
      const double mu = count[a] ? sum[a] / static_cast<double>(count[a]) : 0.0;
      e[a](t) = a == 1 ? p1 : 1.0 - p1;
      gamma[a](t) = mu + (r.a == a ? (y - mu) / e[a](t) : 0.0);
    }
    sum[r.a] += y;
    ++count[r.a];
  }

  double q[2];
  Vector centred[2];
  for (int a = 0; a < 2; ++a) {
    Vector h = allocation_weights(e[a], allocation, forecast);
    const double hs = h.sum();
    q[a] = h.dot(gamma[a]) / hs;
    centred[a] = h.cwiseProduct((gamma[a].array() - q[a]).matrix()) / hs;
  }
  const double variance = (centred[1] - centred[0]).squaredNorm();

  ScalarTestOutcome out;
  out.method = allocation == Allocation::constant ? BaselineMethod::aw_aipw_constant
                                                  : BaselineMethod::aw_aipw_two_point;
  out.estimate = q[1] - q[0];
  if (variance > 0.0) {
    out.statistic = out.estimate / std::sqrt(variance);
  } else if (out.estimate != 0.0) {
    fail(ErrorKind::degenerate_statistic, "AW-AIPW variance estimate is zero");
  }
  out.p_value = two_sided(out.statistic);
  out.reject = out.p_value < alpha;
  return out;
}

}  // namespace vskte
