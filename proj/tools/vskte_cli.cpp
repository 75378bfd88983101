#include <filesystem>
#include <optional>
#include <iostream>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vskte/errors.hpp"
#include "vskte/harness.hpp"

using namespace vskte;
using nlohmann::json;

namespace {

struct Common {
  std::string config_path;
  int threads = 0;
  std::size_t reps = 0;
  std::string out_dir;
};

ExperimentConfig base_config(const Common& c) {
  ExperimentConfig cfg = c.config_path.empty() ? ExperimentConfig{} : load_config(c.config_path);
  if (c.reps) cfg.n_replications = c.reps;
  if (!c.out_dir.empty()) cfg.output_dir = c.out_dir;
  apply_seed_override(cfg);
  return cfg;
}

void set_threads(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

std::string in_dir(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

void print_summaries(const ReplicationReport& r) {
  for (const auto& s : r.summaries)
    std::cerr << r.scenario << " T=" << r.T << " " << to_string(s.method) << ": reject_rate=" << s.reject_rate
              << " (se " << s.stderr_rate << ") ks=" << s.ks << " mean=" << s.mean_stat << " var=" << s.var_stat
              << " failed=" << s.n_failed << "\n";
}

void write_calibration(const ReplicationReport& r, const ExperimentConfig& cfg) {
  write_statistics_csv(in_dir(cfg.output_dir, "stats.csv"), r);
  write_histogram_csv(in_dir(cfg.output_dir, "hist.csv"), r);
  write_qq_csv(in_dir(cfg.output_dir, "qq.csv"), r);
  write_summary_json(in_dir(cfg.output_dir, "summary.json"), r, cfg);
  write_report_csv(in_dir(cfg.output_dir, "report.csv"), r);
  print_summaries(r);
}

json outcome_json(Method m, const TestOutcome& o) {
  const auto& d = o.diagnostics;
  return {{"method", to_string(m)},
          {"statistic", o.statistic},
          {"p_value", o.p_value},
          {"reject", o.reject},
          {"alpha", o.alpha},
          {"diagnostics",
           {{"numerator", d.numerator},
            {"variance_proxy", d.variance_proxy},
            {"n0", d.n0},
            {"n1", d.n1},
            {"warmup_counts", {d.warmup_counts[0], d.warmup_counts[1]}},
            {"kte_sq_estimate", d.kte_sq_estimate}}}};
}

json outcome_json(Method m, const ScalarTestOutcome& o, double alpha) {
  return {{"method", to_string(m)},  {"statistic", o.statistic}, {"p_value", o.p_value},
          {"reject", o.reject},      {"alpha", alpha},           {"estimate", o.estimate}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variance-stabilized doubly robust kernel treatment effect tests for adaptive data"};
  app.require_subcommand(1);
  Common common;

  auto* sim = app.add_subcommand("simulate", "Simulate one adaptive trajectory to JSONL");
  std::string sim_out;
  std::string sim_scenario, sim_model, sim_policy;
  std::size_t sim_T = 0, sim_rep = 0;
  sim->add_option("--config", common.config_path, "Experiment config (JSON)")->check(CLI::ExistingFile);
  sim->add_option("--scenario", sim_scenario, "I, II, III or IV");
  sim->add_option("--model", sim_model, "cosine, linear or sigmoid");
  sim->add_option("--policy", sim_policy, "eps_greedy, etc or uniform");
  sim->add_option("--T", sim_T, "Horizon");
  sim->add_option("--replication", sim_rep, "Replication index used to derive the seed");
  sim->add_option("-o,--out", sim_out, "Output trajectory path")->required();

  auto* test = app.add_subcommand("test", "Run tests on a trajectory file; prints JSON");
  std::string traj_path, split_name = "alternating", sidedness_name, nuisance_name;
  std::vector<std::string> method_names;
  double alpha = 0.05;
  test->add_option("trajectory", traj_path, "Trajectory JSONL")->required()->check(CLI::ExistingFile);
  test->add_option("--method", method_names, "Method(s): " + available_methods())->default_str("vs-dr-kte");
  test->add_option("--alpha", alpha, "Significance level");
  test->add_option("--split", split_name, "alternating or contiguous");
  test->add_option("--sidedness", sidedness_name, "one-sided or two-sided");
  test->add_option("--nuisance", nuisance_name, "sequential, hat or crossfit");
  test->add_option("--config", common.config_path, "Config supplying kernel and weight settings")
      ->check(CLI::ExistingFile);

  auto* cal = app.add_subcommand("calibrate", "Monte-Carlo calibration run from a config");
  auto* pow = app.add_subcommand("power", "Power sweep over scenarios and horizons from a config");
  for (auto* sc : {cal, pow}) {
    sc->add_option("config", common.config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sc->add_option("--out", common.out_dir, "Output directory (overrides config)");
    sc->add_option("--reps", common.reps, "Override the replication count");
    sc->add_option("--threads", common.threads, "Worker threads");
  }

  auto* rep = app.add_subcommand("reproduce", "Run a named desk-scale preset");
  std::string preset;
  std::string names;
  for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
  rep->add_option("preset", preset, "One of: " + names)->required();
  rep->add_option("--out", common.out_dir, "Output directory (default: ./<preset>)");
  rep->add_option("--reps", common.reps, "Override the replication count");
  rep->add_option("--threads", common.threads, "Worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    set_threads(common.threads);
    if (*sim) {
      ExperimentConfig cfg = base_config(common);
      if (!sim_scenario.empty()) {
        cfg.env.synthetic.scenario = parse_scenario(sim_scenario);
        cfg.env.image_scenario = cfg.env.synthetic.scenario;
      }
      if (!sim_model.empty()) cfg.env.synthetic.model = parse_outcome_model(sim_model);
      if (sim_policy == "eps_greedy") cfg.policy.kind = PolicyKind::eps_greedy;
      else if (sim_policy == "etc") cfg.policy.kind = PolicyKind::etc;
      else if (sim_policy == "uniform") cfg.policy.kind = PolicyKind::uniform;
      else if (!sim_policy.empty()) fail(ErrorKind::input, "unknown policy '" + sim_policy + "'");
      if (sim_T) cfg.T = sim_T;
      std::optional<CovariatePool> pool;
      if (cfg.env.kind == EnvKind::pool) pool = load_covariate_pool(cfg.env.pool_path, cfg.env.pool_standardize);
      save_trajectory(sim_out, simulate(cfg, sim_rep, pool ? &*pool : nullptr));
      return 0;
    }
    if (*test) {
      ExperimentConfig cfg = base_config(common);
      cfg.test.alpha = alpha;
      cfg.split = parse_split_mode(split_name);
      if (!sidedness_name.empty()) cfg.test.sidedness = parse_sidedness(sidedness_name);
      if (!nuisance_name.empty()) cfg.test.nuisance = parse_nuisance_mode(nuisance_name);
      if (method_names.empty()) method_names.push_back("vs-dr-kte");
      Trajectory traj = load_trajectory(traj_path);
      FoldSplit split = FoldSplit::make(cfg.split, traj.size());
      json results = json::array();
      for (const auto& name : method_names) {
        Method m = parse_method(name);
        switch (m) {
          case Method::vs_dr_kte: results.push_back(outcome_json(m, vs_dr_kte(traj, split, cfg.test))); break;
          case Method::dr_kte: results.push_back(outcome_json(m, dr_kte_unstabilized(traj, split, cfg.test))); break;
          case Method::cadr:
            results.push_back(outcome_json(
                m, cadr_ate_test(traj, cadr_config(cfg)), alpha));
            break;
          case Method::aw_aipw:
            results.push_back(outcome_json(m, aw_aipw_test(traj, Allocation::constant, alpha), alpha));
            break;
          case Method::aw_aipw_two_point:
            results.push_back(outcome_json(m, aw_aipw_test(traj, Allocation::two_point, alpha), alpha));
            break;
        }
      }
      std::cout << (results.size() == 1 ? results[0] : results).dump(2) << "\n";
      return 0;
    }
    if (*cal) {
      ExperimentConfig cfg = base_config(common);
      write_calibration(run_experiment(cfg), cfg);
      return 0;
    }
    if (*pow) {
      ExperimentConfig cfg = base_config(common);
      for (const auto& r : run_power(cfg, in_dir(cfg.output_dir, "power.csv"))) print_summaries(r);
      return 0;
    }
    if (*rep) {
      ExperimentConfig cfg = preset_config(preset);
      cfg.output_dir = common.out_dir.empty() ? preset : common.out_dir;
      if (common.reps) cfg.n_replications = common.reps;
      apply_seed_override(cfg);
      if (cfg.scenario_sweep.empty() && cfg.T_sweep.empty()) {
        write_calibration(run_experiment(cfg), cfg);
      } else {
        auto reports = run_power(cfg, in_dir(cfg.output_dir, "power.csv"));
        // The first (null) cell doubles as the calibration panel.
        write_calibration(reports.front(), cfg);
        for (std::size_t i = 1; i < reports.size(); ++i) print_summaries(reports[i]);
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return 2;
  }
  return 0;
}
