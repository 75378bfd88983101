#include "vskte/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <optional>

#include "vskte/errors.hpp"
#include "vskte/normal.hpp"

namespace vskte {

CadrConfig cadr_config(const ExperimentConfig& c) {
  CadrConfig cc{c.baseline_ridge, c.test.weights, c.test.alpha};
  cc.weights.warmup_min = c.baseline_warmup;
  return cc;
}

std::string scenario_label(const EnvConfig& env) {
  switch (env.kind) {
    case EnvKind::synthetic:
      return std::string(to_string(env.synthetic.model)) + ":" + to_string(env.synthetic.scenario);
    case EnvKind::image: return std::string("blob:") + to_string(env.image_scenario);
    case EnvKind::pool: return std::string("pool:") + to_string(env.synthetic.scenario);
  }
  return "?";
}

std::uint64_t replication_seed(std::uint64_t master, std::uint64_t replication) {
  return derive_seed(master, replication);
}

std::unique_ptr<Environment> make_environment(const EnvConfig& env, std::uint64_t seed,
                                              const CovariatePool* pool) {
  switch (env.kind) {
    case EnvKind::synthetic: return make_synthetic_env(env.synthetic, seed);
    case EnvKind::image: return make_image_env(env.image, seed);
    case EnvKind::pool:
      if (!pool) fail(ErrorKind::input, "pool environment needs a loaded covariate pool");
      return make_pool_env(*pool, env.synthetic, seed);
  }
  fail(ErrorKind::input, "unknown environment kind");
}

Trajectory simulate(const ExperimentConfig& c, std::uint64_t replication, const CovariatePool* pool) {
  const std::uint64_t seed = replication_seed(c.master_seed, replication);
  auto env = make_environment(c.env, derive_seed(seed, 1), pool);
  const std::uint64_t policy_seed = derive_seed(seed, 2);
  switch (c.policy.kind) {
    case PolicyKind::eps_greedy: return run_eps_greedy(*env, c.T, c.policy.eps_greedy, policy_seed);
    case PolicyKind::etc: return run_etc(*env, c.T, c.policy.etc, policy_seed);
    case PolicyKind::uniform: return run_uniform(*env, c.T, policy_seed);
  }
  fail(ErrorKind::input, "unknown policy kind");
}

namespace {

std::string describe(const Error& e) { return std::string(to_string(e.kind())) + ": " + e.what(); }

MethodResult from_test(const TestOutcome& o) { return {true, o.statistic, o.p_value, o.reject, {}}; }
MethodResult from_scalar(const ScalarTestOutcome& o) { return {true, o.statistic, o.p_value, o.reject, {}}; }

// Runs every requested method on one trajectory, sharing the Gram work.
std::vector<MethodResult> run_methods(const Trajectory& traj, const ExperimentConfig& c) {
  std::optional<PreparedData> prepared;
  std::string prepare_error;
  auto data = [&]() -> const PreparedData& {
    if (!prepared) prepared = prepare(traj, FoldSplit::make(c.split, traj.size()), c.test.kernels);
    return *prepared;
  };
  std::vector<MethodResult> out;
  for (Method m : c.methods) {
    MethodResult r;
    try {
      switch (m) {
        case Method::vs_dr_kte: r = from_test(vs_dr_kte(data(), c.test)); break;
        case Method::dr_kte: r = from_test(dr_kte_unstabilized(data(), c.test)); break;
        default: r = run_method(m, traj, c); break;
      }
    } catch (const Error& e) {
      r = MethodResult{false, 0.0, 1.0, false, describe(e)};
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace

MethodResult run_method(Method m, const Trajectory& traj, const ExperimentConfig& c) {
  try {
    switch (m) {
      case Method::vs_dr_kte: return from_test(vs_dr_kte(traj, FoldSplit::make(c.split, traj.size()), c.test));
      case Method::dr_kte:
        return from_test(dr_kte_unstabilized(traj, FoldSplit::make(c.split, traj.size()), c.test));
      case Method::cadr: {
        return from_scalar(cadr_ate_test(traj, cadr_config(c)));
      }
      case Method::aw_aipw: return from_scalar(aw_aipw_test(traj, Allocation::constant, c.test.alpha));
      case Method::aw_aipw_two_point:
        return from_scalar(aw_aipw_test(traj, Allocation::two_point, c.test.alpha));
    }
  } catch (const Error& e) {
    return MethodResult{false, 0.0, 1.0, false, describe(e)};
  }
  return {};
}

ReplicationReport run_experiment(const ExperimentConfig& c) {
  if (c.n_replications < 1) fail(ErrorKind::input, "n_replications must be at least 1");
  if (c.methods.empty()) fail(ErrorKind::input, "no methods requested");
  std::optional<CovariatePool> pool;
  if (c.env.kind == EnvKind::pool) pool = load_covariate_pool(c.env.pool_path, c.env.pool_standardize);

  ReplicationReport report;
  report.scenario = scenario_label(c.env);
  report.T = c.T;
  report.n_replications = c.n_replications;
  report.methods = c.methods;
  std::vector<std::vector<MethodResult>> per_rep(c.n_replications);

  const auto n = static_cast<long>(c.n_replications);
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      Trajectory traj = simulate(c, static_cast<std::uint64_t>(i), pool ? &*pool : nullptr);
      per_rep[i] = run_methods(traj, c);
    } catch (const Error& e) {
      per_rep[i].assign(c.methods.size(), MethodResult{false, 0.0, 1.0, false, describe(e)});
    } catch (const std::exception& e) {
      per_rep[i].assign(c.methods.size(), MethodResult{false, 0.0, 1.0, false, e.what()});
    }
  }

  report.results.assign(c.methods.size(), {});
  for (std::size_t m = 0; m < c.methods.size(); ++m) {
    for (std::size_t i = 0; i < c.n_replications; ++i) report.results[m].push_back(per_rep[i][m]);
    MethodSummary s = summarize(c.methods[m], report.results[m]);
    if (s.n_failed * 10 > c.n_replications) {
      std::string first;
      for (const auto& r : report.results[m])
        if (!r.ok) {
          first = r.error;
          break;
        }
      fail(ErrorKind::numerical, std::string("more than 10% of replications failed for ") +
                                     to_string(c.methods[m]) + " (first: " + first + ")");
    }
    report.summaries.push_back(std::move(s));
  }
  return report;
}

double ks_distance(std::vector<double> samples) {
  if (samples.empty()) fail(ErrorKind::input, "ks_distance: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double f = normal_cdf(samples[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double binomial_stderr(double rate, std::size_t n) {
  if (n == 0) return 0.0;
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(n));
}

std::vector<HistogramBin> histogram(const std::vector<double>& samples, std::size_t bins, double lo, double hi) {
  if (bins == 0 || !(hi > lo)) fail(ErrorKind::input, "histogram: invalid range");
  std::vector<HistogramBin> out(bins);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lo = lo + width * static_cast<double>(b);
    out[b].hi = lo + width * static_cast<double>(b + 1);
  }
  for (double x : samples) {
    auto b = static_cast<long>(std::floor((x - lo) / width));
    b = std::clamp<long>(b, 0, static_cast<long>(bins) - 1);
    ++out[b].count;
  }
  return out;
}

std::vector<std::pair<double, double>> qq_pairs(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  std::vector<std::pair<double, double>> out;
  out.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    out.emplace_back(normal_quantile((static_cast<double>(i) + 0.5) / n), samples[i]);
  return out;
}

MethodSummary summarize(Method m, const std::vector<MethodResult>& results) {
  MethodSummary s;
  s.method = m;
  std::vector<double> stats;
  std::size_t rejects = 0;
  for (const auto& r : results) {
    if (!r.ok) {
      ++s.n_failed;
      continue;
    }
    stats.push_back(r.statistic);
    rejects += r.reject ? 1 : 0;
  }
  s.n_ok = stats.size();
  if (stats.empty()) return s;
  const double n = static_cast<double>(stats.size());
  s.reject_rate = static_cast<double>(rejects) / n;
  s.stderr_rate = binomial_stderr(s.reject_rate, stats.size());
  s.ks = ks_distance(stats);
  s.mean_stat = std::accumulate(stats.begin(), stats.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : stats) ss += (x - s.mean_stat) * (x - s.mean_stat);
  s.var_stat = stats.size() > 1 ? ss / (n - 1.0) : 0.0;
  auto [mn, mx] = std::minmax_element(stats.begin(), stats.end());
  double lo = std::min(-4.0, std::floor(*mn)), hi = std::max(4.0, std::ceil(*mx));
  s.histogram = histogram(stats, 40, lo, hi);
  s.qq = qq_pairs(stats);
  return s;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) fail(ErrorKind::input, "cannot write '" + path + "'");
  out << std::setprecision(17);
  return out;
}

}  // namespace

void write_statistics_csv(const std::string& path, const ReplicationReport& r) {
  auto out = open_out(path);
  out << "replication,method,statistic,p_value,reject,ok,error\n";
  for (std::size_t m = 0; m < r.methods.size(); ++m)
    for (std::size_t i = 0; i < r.results[m].size(); ++i) {
      const auto& res = r.results[m][i];
      std::string err = res.error;
      std::replace(err.begin(), err.end(), ',', ';');
      out << i << ',' << to_string(r.methods[m]) << ',' << res.statistic << ',' << res.p_value << ','
          << (res.reject ? 1 : 0) << ',' << (res.ok ? 1 : 0) << ',' << err << '\n';
    }
}

void write_histogram_csv(const std::string& path, const ReplicationReport& r) {
  auto out = open_out(path);
  out << "method,bin_lo,bin_hi,count,density\n";
  for (const auto& s : r.summaries)
    for (const auto& b : s.histogram) {
      double density = s.n_ok ? static_cast<double>(b.count) / (static_cast<double>(s.n_ok) * (b.hi - b.lo)) : 0.0;
      out << to_string(s.method) << ',' << b.lo << ',' << b.hi << ',' << b.count << ',' << density << '\n';
    }
}

void write_qq_csv(const std::string& path, const ReplicationReport& r) {
  auto out = open_out(path);
  out << "method,normal_quantile,statistic\n";
  for (const auto& s : r.summaries)
    for (const auto& [q, x] : s.qq) out << to_string(s.method) << ',' << q << ',' << x << '\n';
}

void write_summary_json(const std::string& path, const ReplicationReport& r, const ExperimentConfig& c) {
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& s : r.summaries)
    methods.push_back({{"method", to_string(s.method)},
                       {"n_ok", s.n_ok},
                       {"n_failed", s.n_failed},
                       {"reject_rate", s.reject_rate},
                       {"stderr", s.stderr_rate},
                       {"ks", s.ks},
                       {"mean_stat", s.mean_stat},
                       {"var_stat", s.var_stat}});
  nlohmann::json j = {{"scenario", r.scenario},
                      {"T", r.T},
                      {"n_replications", r.n_replications},
                      {"methods", methods},
                      {"config", config_to_json(c)}};
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void append_power_rows(std::ostream& out, const ReplicationReport& r) {
  for (const auto& s : r.summaries)
    out << to_string(s.method) << ',' << r.scenario << ',' << r.T << ',' << s.n_ok << ',' << s.reject_rate
        << ',' << s.stderr_rate << ',' << s.ks << ',' << s.mean_stat << ',' << s.var_stat << '\n';
}

void write_report_csv(const std::string& path, const ReplicationReport& r) {
  auto out = open_out(path);
  out << kPowerCsvHeader << '\n';
  append_power_rows(out, r);
}

std::vector<ReplicationReport> run_power(const ExperimentConfig& c, const std::string& csv_path) {
  std::vector<Scenario> scenarios = c.scenario_sweep;
  if (scenarios.empty())
    scenarios.push_back(c.env.kind == EnvKind::image ? c.env.image_scenario : c.env.synthetic.scenario);
  std::vector<std::size_t> horizons = c.T_sweep;
  if (horizons.empty()) horizons.push_back(c.T);

  auto out = open_out(csv_path);
  out << kPowerCsvHeader << '\n';
  std::vector<ReplicationReport> reports;
  for (Scenario s : scenarios) {
    for (std::size_t T : horizons) {
      ExperimentConfig run = c;
      run.T = T;
      run.env.synthetic.scenario = s;
      run.env.image_scenario = s;
      if (c.env.kind == EnvKind::image && !c.scenario_sweep.empty())
        run.env.image.shift_delta = s == Scenario::I ? 0.0 : 0.15;
      reports.push_back(run_experiment(run));
      append_power_rows(out, reports.back());
      out.flush();
    }
  }
  return reports;
}

}  // namespace vskte
