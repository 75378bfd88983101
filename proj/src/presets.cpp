#include "vskte/errors.hpp"
#include "vskte/harness.hpp"

namespace vskte {

std::vector<std::string> preset_names() {
  return {"fig1", "fig2", "fig3-cosine", "fig3-linear", "fig3-sigmoid", "table2-blob"};
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  if (name == "fig1") {
    // Explore-then-commit miscalibration demo.
    c.policy.kind = PolicyKind::etc;
    c.T = 700;
    c.n_replications = 200;
    c.methods = {Method::vs_dr_kte, Method::dr_kte};
    return c;
  }
  if (name == "fig2") {
    c.T = 1000;
    c.n_replications = 200;
    c.methods = {Method::vs_dr_kte};
    return c;
  }
  if (name == "fig3-cosine" || name == "fig3-linear" || name == "fig3-sigmoid") {
    c.env.synthetic.model = parse_outcome_model(name.substr(5));
    c.n_replications = 100;
    c.methods = {Method::vs_dr_kte, Method::cadr, Method::aw_aipw};
    c.scenario_sweep = {Scenario::I, Scenario::II, Scenario::III, Scenario::IV};
    c.T_sweep = {250, 500, 1000};
    return c;
  }
  if (name == "table2-blob") {
    c.env.kind = EnvKind::image;
    c.env.image.grid = 32;
    c.T = 600;
    c.n_replications = 100;
    c.methods = {Method::vs_dr_kte, Method::cadr, Method::aw_aipw};
    c.scenario_sweep = {Scenario::I, Scenario::IV};
    return c;
  }
  std::string names;
  for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
  fail(ErrorKind::input, "unknown preset '" + name + "'; available: " + names);
}

}  // namespace vskte
