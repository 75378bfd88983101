#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "vskte/adaptive_sim.hpp"
#include "vskte/baselines.hpp"
#include "vskte/kte_test.hpp"
#include "vskte/scenarios.hpp"

namespace vskte {

enum class Method { vs_dr_kte, dr_kte, cadr, aw_aipw, aw_aipw_two_point };

Method parse_method(const std::string& name);
const char* to_string(Method m);
std::string available_methods();

enum class EnvKind { synthetic, image, pool };
enum class PolicyKind { eps_greedy, etc, uniform };

struct EnvConfig {
  EnvKind kind = EnvKind::synthetic;
  ScenarioSpec synthetic;
  ImageEnvSpec image;
  // Image runs label the shifted environment as Scenario IV.
  Scenario image_scenario = Scenario::I;
  std::string pool_path;
  bool pool_standardize = true;
};

struct PolicyConfig {
  PolicyKind kind = PolicyKind::eps_greedy;
  EpsGreedyParams eps_greedy;
  EtcParams etc;
};

struct ExperimentConfig {
  EnvConfig env;
  PolicyConfig policy;
  std::size_t T = 1000;
  std::size_t n_replications = 200;
  SplitMode split = SplitMode::alternating;
  TestConfig test;
  double baseline_ridge = 1e-2;
  // CADR's scalar variance estimate needs a longer burn-in than the kernel weights.
  std::size_t baseline_warmup = 100;
  std::vector<Method> methods{Method::vs_dr_kte};
  std::uint64_t master_seed = 20240601;
  std::string output_dir = ".";
  // Power sweeps; empty means the single scenario / T above.
  std::vector<Scenario> scenario_sweep;
  std::vector<std::size_t> T_sweep;
};

// Throws Error(parse) naming the offending JSON path.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::string& path);

// VSKTE_SEED, when set, replaces the master seed.
void apply_seed_override(ExperimentConfig& c);

CadrConfig cadr_config(const ExperimentConfig& c);

std::string scenario_label(const EnvConfig& env);

std::unique_ptr<Environment> make_environment(const EnvConfig& env, std::uint64_t seed,
                                              const CovariatePool* pool = nullptr);
Trajectory simulate(const ExperimentConfig& c, std::uint64_t replication,
                    const CovariatePool* pool = nullptr);

std::uint64_t replication_seed(std::uint64_t master, std::uint64_t replication);

struct MethodResult {
  bool ok = false;
  double statistic = 0.0;
  double p_value = 1.0;
  bool reject = false;
  std::string error;
};

MethodResult run_method(Method m, const Trajectory& traj, const ExperimentConfig& c);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

struct MethodSummary {
  Method method = Method::vs_dr_kte;
  std::size_t n_ok = 0;
  std::size_t n_failed = 0;
  double reject_rate = 0.0;
  double stderr_rate = 0.0;
  double ks = 0.0;
  double mean_stat = 0.0;
  double var_stat = 0.0;
  std::vector<HistogramBin> histogram;
  std::vector<std::pair<double, double>> qq;  // (normal quantile, sorted statistic)
};

struct ReplicationReport {
  std::string scenario;
  std::size_t T = 0;
  std::size_t n_replications = 0;
  std::vector<Method> methods;
  std::vector<std::vector<MethodResult>> results;  // [method][replication]
  std::vector<MethodSummary> summaries;
};

ReplicationReport run_experiment(const ExperimentConfig& c);

double ks_distance(std::vector<double> samples);
double binomial_stderr(double rate, std::size_t n);
std::vector<HistogramBin> histogram(const std::vector<double>& samples, std::size_t bins,
                                    double lo, double hi);
std::vector<std::pair<double, double>> qq_pairs(std::vector<double> samples);
MethodSummary summarize(Method m, const std::vector<MethodResult>& results);

void write_statistics_csv(const std::string& path, const ReplicationReport& r);
void write_histogram_csv(const std::string& path, const ReplicationReport& r);
void write_qq_csv(const std::string& path, const ReplicationReport& r);
void write_summary_json(const std::string& path, const ReplicationReport& r,
                        const ExperimentConfig& c);

inline constexpr const char* kPowerCsvHeader =
    "method,scenario,T,n_reps,reject_rate,stderr,ks,mean_stat,var_stat";
void append_power_rows(std::ostream& out, const ReplicationReport& r);
void write_report_csv(const std::string& path, const ReplicationReport& r);

// Runs the scenario x T grid of a power config and writes the table.
std::vector<ReplicationReport> run_power(const ExperimentConfig& c, const std::string& csv_path);

std::vector<std::string> preset_names();
// Desk-scale configuration for a named preset; throws input error when unknown.
ExperimentConfig preset_config(const std::string& name);

}  // namespace vskte
