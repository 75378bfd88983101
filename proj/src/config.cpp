#include <cstdlib>
#include <fstream>
#include <set>

#include "vskte/errors.hpp"
#include "vskte/harness.hpp"

namespace vskte {

Method parse_method(const std::string& name) {
  if (name == "vs-dr-kte") return Method::vs_dr_kte;
  if (name == "dr-kte") return Method::dr_kte;
  if (name == "cadr") return Method::cadr;
  if (name == "aw-aipw") return Method::aw_aipw;
  if (name == "aw-aipw-two-point") return Method::aw_aipw_two_point;
  fail(ErrorKind::input, "unknown method '" + name + "'; available: " + available_methods());
}

const char* to_string(Method m) {
  switch (m) {
    case Method::vs_dr_kte: return "vs-dr-kte";
    case Method::dr_kte: return "dr-kte";
    case Method::cadr: return "cadr";
    case Method::aw_aipw: return "aw-aipw";
    case Method::aw_aipw_two_point: return "aw-aipw-two-point";
  }
  return "?";
}

std::string available_methods() { return "vs-dr-kte, dr-kte, cadr, aw-aipw, aw-aipw-two-point"; }

namespace {

using nlohmann::json;

// Reads typed fields of one JSON object and rejects unknown keys, reporting
// failures with the dotted path of the offending field.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorKind::parse, "config " + where() + ": expected an object");
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(ErrorKind::parse, "config " + field(key) + ": wrong type");
    }
  }

  template <typename Parse, typename T>
  void get_enum(const std::string& key, T& out, Parse parse) {
    std::string name;
    get(key, name);
    if (name.empty()) return;
    try {
      out = parse(name);
    } catch (const Error& e) {
      fail(ErrorKind::parse, "config " + field(key) + ": " + e.what());
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  Reader child(const std::string& key) {
    seen_.insert(key);
    return Reader(j_.contains(key) ? j_.at(key) : empty_, field(key));
  }

  void positive(const std::string& key, double v) {
    if (!(v > 0.0)) fail(ErrorKind::parse, "config " + field(key) + ": must be positive");
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(ErrorKind::parse, "config " + field(it.key()) + ": unknown field");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "(root)" : path_; }

 private:
  inline static const json empty_ = json::object();
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

KernelSpec read_kernel(Reader r, KernelSpec def) {
  std::string rule;
  r.get("rule", rule);
  double lengthscale = 0.0, precision = 0.0;
  r.get("lengthscale", lengthscale);
  r.get("precision", precision);
  r.finish();
  if (rule.empty()) return def;
  if (rule == "median") return KernelSpec::median();
  if (rule == "half_median") return KernelSpec::half_median();
  if (rule == "fixed") {
    r.positive("lengthscale", lengthscale);
    return KernelSpec::fixed(lengthscale);
  }
  if (rule == "precision") {
    r.positive("precision", precision);
    return KernelSpec::from_precision(precision);
  }
  fail(ErrorKind::parse, "config " + r.field("rule") + ": expected median, half_median, fixed or precision");
}

json kernel_json(const KernelSpec& k) {
  switch (k.rule) {
    case LengthscaleRule::median: return {{"rule", "median"}};
    case LengthscaleRule::half_median: return {{"rule", "half_median"}};
    case LengthscaleRule::fixed: return {{"rule", "fixed"}, {"lengthscale", k.fixed_lengthscale}};
  }
  return {};
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  Reader root(j, "");

  Reader env = root.child("env");
  std::string kind = "synthetic";
  env.get("kind", kind);
  if (kind == "synthetic") c.env.kind = EnvKind::synthetic;
  else if (kind == "image") c.env.kind = EnvKind::image;
  else if (kind == "pool") c.env.kind = EnvKind::pool;
  else fail(ErrorKind::parse, "config env.kind: expected synthetic, image or pool");
  env.get_enum("model", c.env.synthetic.model, parse_outcome_model);
  env.get_enum("scenario", c.env.synthetic.scenario, parse_scenario);
  std::size_t d = c.env.synthetic.d;
  env.get("d", d);
  std::vector<double> beta;
  env.get("beta", beta);
  if (!beta.empty()) {
    c.env.synthetic.beta = Eigen::Map<Vector>(beta.data(), static_cast<Eigen::Index>(beta.size()));
    if (!env.has("d")) d = beta.size();
  } else if (d != c.env.synthetic.d && c.env.kind != EnvKind::pool) {
    fail(ErrorKind::parse, "config env.beta: required when env.d differs from the default 5");
  }
  c.env.synthetic.d = d;
  // The semi-synthetic overlay defaults to an all-ones beta sized to the pool width.
  if (c.env.kind == EnvKind::pool && beta.empty()) c.env.synthetic.beta = Vector();
  if (static_cast<std::size_t>(c.env.synthetic.beta.size()) != d && c.env.kind != EnvKind::pool)
    fail(ErrorKind::parse, "config env.beta: length must equal env.d");
  env.get("noise_sd", c.env.synthetic.noise_sd);
  env.positive("noise_sd", c.env.synthetic.noise_sd);
  env.get("grid", c.env.image.grid);
  env.get("pixel_noise_sd", c.env.image.pixel_noise_sd);
  env.get("blob_scale", c.env.image.blob_scale);
  c.env.image_scenario = c.env.synthetic.scenario;
  c.env.image.shift_delta = c.env.image_scenario == Scenario::I ? 0.0 : 0.15;
  if (env.has("shift")) {
    env.get("shift", c.env.image.shift_delta);
    c.env.image_scenario = c.env.image.shift_delta == 0.0 ? Scenario::I : Scenario::IV;
  }
  env.get("csv", c.env.pool_path);
  env.get("standardize", c.env.pool_standardize);
  env.finish();
  if (c.env.kind == EnvKind::pool && c.env.pool_path.empty())
    fail(ErrorKind::parse, "config env.csv: required for the pool environment");

  Reader pol = root.child("policy");
  std::string pkind = "eps_greedy";
  pol.get("kind", pkind);
  if (pkind == "eps_greedy") c.policy.kind = PolicyKind::eps_greedy;
  else if (pkind == "etc") c.policy.kind = PolicyKind::etc;
  else if (pkind == "uniform") c.policy.kind = PolicyKind::uniform;
  else fail(ErrorKind::parse, "config policy.kind: expected eps_greedy, etc or uniform");
  pol.get("eps0", c.policy.eps_greedy.eps0);
  pol.get("eps_min", c.policy.eps_greedy.eps_min);
  pol.get("power", c.policy.eps_greedy.power);
  pol.get("ridge", c.policy.eps_greedy.ridge);
  pol.get("t0", c.policy.etc.t0);
  pol.get("epsilon", c.policy.etc.epsilon);
  pol.finish();

  root.get("T", c.T);
  root.get("n_replications", c.n_replications);
  if (c.n_replications < 1) fail(ErrorKind::parse, "config n_replications: must be at least 1");
  if (c.T < 4) fail(ErrorKind::parse, "config T: must be at least 4");
  root.get_enum("split", c.split, parse_split_mode);

  Reader ker = root.child("kernel");
  c.test.kernels.covariate = read_kernel(ker.child("covariate"), c.test.kernels.covariate);
  c.test.kernels.outcome = read_kernel(ker.child("outcome"), c.test.kernels.outcome);
  ker.finish();

  root.get("lambda", c.test.ridge);
  root.positive("lambda", c.test.ridge);
  root.get("alpha", c.test.alpha);
  if (!(c.test.alpha > 0.0 && c.test.alpha < 1.0)) fail(ErrorKind::parse, "config alpha: must lie in (0, 1)");
  root.get_enum("sidedness", c.test.sidedness, parse_sidedness);
  root.get_enum("nuisance", c.test.nuisance, parse_nuisance_mode);

  Reader w = root.child("weights");
  w.get("warmup_min", c.test.weights.warmup_min);
  w.get_enum("warmup", c.test.weights.warmup, parse_warmup_policy);
  w.get_enum("normalization", c.test.weights.normalization, parse_normalization);
  w.get("variance_floor", c.test.weights.variance_floor);
  w.get("omega_max", c.test.weights.omega_max);
  w.get("clip", c.test.weights.clip);
  w.finish();
  root.get("baseline_ridge", c.baseline_ridge);
  root.get("baseline_warmup", c.baseline_warmup);

  std::vector<std::string> methods;
  root.get("methods", methods);
  if (root.has("methods")) {
    if (methods.empty()) fail(ErrorKind::parse, "config methods: list is empty");
    c.methods.clear();
    for (const auto& m : methods) {
      try {
        c.methods.push_back(parse_method(m));
      } catch (const Error& e) {
        fail(ErrorKind::parse, std::string("config methods: ") + e.what());
      }
    }
  }
  root.get("master_seed", c.master_seed);
  root.get("output_dir", c.output_dir);

  Reader sweep = root.child("sweep");
  std::vector<std::string> scenarios;
  sweep.get("scenarios", scenarios);
  for (const auto& s : scenarios) {
    try {
      c.scenario_sweep.push_back(parse_scenario(s));
    } catch (const Error& e) {
      fail(ErrorKind::parse, std::string("config sweep.scenarios: ") + e.what());
    }
  }
  sweep.get("T", c.T_sweep);
  sweep.finish();
  root.finish();
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  json env;
  const char* kinds[] = {"synthetic", "image", "pool"};
  env["kind"] = kinds[static_cast<int>(c.env.kind)];
  env["model"] = to_string(c.env.synthetic.model);
  env["scenario"] = to_string(c.env.kind == EnvKind::image ? c.env.image_scenario : c.env.synthetic.scenario);
  env["d"] = c.env.synthetic.d;
  env["beta"] = std::vector<double>(c.env.synthetic.beta.data(),
                                    c.env.synthetic.beta.data() + c.env.synthetic.beta.size());
  env["noise_sd"] = c.env.synthetic.noise_sd;
  if (c.env.kind == EnvKind::image) {
    env["grid"] = c.env.image.grid;
    env["shift"] = c.env.image.shift_delta;
    env["pixel_noise_sd"] = c.env.image.pixel_noise_sd;
    env["blob_scale"] = c.env.image.blob_scale;
  }
  if (c.env.kind == EnvKind::pool) {
    env["csv"] = c.env.pool_path;
    env["standardize"] = c.env.pool_standardize;
  }
  const char* pkinds[] = {"eps_greedy", "etc", "uniform"};
  json policy = {{"kind", pkinds[static_cast<int>(c.policy.kind)]},
                 {"eps0", c.policy.eps_greedy.eps0},
                 {"eps_min", c.policy.eps_greedy.eps_min},
                 {"power", c.policy.eps_greedy.power},
                 {"ridge", c.policy.eps_greedy.ridge},
                 {"t0", c.policy.etc.t0},
                 {"epsilon", c.policy.etc.epsilon}};
  std::vector<std::string> methods;
  for (Method m : c.methods) methods.push_back(to_string(m));
  json out = {{"env", env},
              {"policy", policy},
              {"T", c.T},
              {"n_replications", c.n_replications},
              {"split", to_string(c.split)},
              {"kernel", {{"covariate", kernel_json(c.test.kernels.covariate)},
                          {"outcome", kernel_json(c.test.kernels.outcome)}}},
              {"lambda", c.test.ridge},
              {"alpha", c.test.alpha},
              {"sidedness", to_string(c.test.sidedness)},
              {"nuisance", to_string(c.test.nuisance)},
              {"weights", {{"warmup_min", c.test.weights.warmup_min},
                           {"warmup", to_string(c.test.weights.warmup)},
                           {"normalization", to_string(c.test.weights.normalization)},
                           {"variance_floor", c.test.weights.variance_floor},
                           {"omega_max", c.test.weights.omega_max},
                           {"clip", c.test.weights.clip}}},
              {"baseline_ridge", c.baseline_ridge},
              {"baseline_warmup", c.baseline_warmup},
              {"methods", methods},
              {"master_seed", c.master_seed},
              {"output_dir", c.output_dir}};
  if (!c.scenario_sweep.empty() || !c.T_sweep.empty()) {
    std::vector<std::string> sc;
    for (Scenario s : c.scenario_sweep) sc.push_back(to_string(s));
    out["sweep"] = {{"scenarios", sc}, {"T", c.T_sweep}};
  }
  return out;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::input, "cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::parse, "config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

void apply_seed_override(ExperimentConfig& c) {
  if (const char* s = std::getenv("VSKTE_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (end == s || *end != '\0') fail(ErrorKind::input, "VSKTE_SEED must be an unsigned integer");
    c.master_seed = v;
  }
}

}  // namespace vskte
