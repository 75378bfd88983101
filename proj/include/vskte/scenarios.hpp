#pragma once

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "vskte/rng.hpp"
#include "vskte/types.hpp"

namespace vskte {

struct PotentialOutcomes {
  Vector x;
  Vector y0;
  Vector y1;
};

// Stateful sampler owning its random stream; one instance per replication.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual PotentialOutcomes draw() = 0;
  virtual std::size_t context_dim() const = 0;
  virtual std::size_t outcome_dim() const = 0;
  virtual nlohmann::json descriptor() const = 0;
};

enum class OutcomeModel { cosine, linear, sigmoid };
enum class Scenario { I, II, III, IV };

OutcomeModel parse_outcome_model(const std::string& name);
Scenario parse_scenario(const std::string& name);
const char* to_string(OutcomeModel m);
const char* to_string(Scenario s);

struct ScenarioSpec {
  OutcomeModel model = OutcomeModel::cosine;
  Scenario scenario = Scenario::I;
  std::size_t d = 5;
  Vector beta = (Vector(5) << 0.1, 0.2, 0.3, 0.4, 0.5).finished();
  double noise_sd = 0.7071067811865476;
};

double outcome_mean(OutcomeModel model, double z);
double draw_effect(Scenario s, Rng& rng);

std::unique_ptr<Environment> make_synthetic_env(const ScenarioSpec& spec, std::uint64_t seed);

struct ImageEnvSpec {
  std::size_t grid = 32;
  double shift_delta = 0.0;
  double pixel_noise_sd = 0.1;
  // Blob standard deviation as a fraction of the grid side.
  double blob_scale = 0.05;
};

// Noise-free blob centred at horizontal/vertical positions in [0, 1 + shift];
// positions are mapped into the grid interior so a shifted blob stays on it.
Vector render_blob(const ImageEnvSpec& spec, double px, double py);

std::unique_ptr<Environment> make_image_env(const ImageEnvSpec& spec, std::uint64_t seed);

struct CovariatePool {
  Matrix rows;
  std::vector<std::string> header;
};

CovariatePool load_covariate_pool(const std::string& path, bool standardize);
CovariatePool parse_covariate_csv(const std::string& text, bool standardize);

// Draws pool rows without replacement; outcomes follow `overlay` with beta
// resized to the pool width (all ones when overlay.beta is empty).
std::unique_ptr<Environment> make_pool_env(const CovariatePool& pool, ScenarioSpec overlay,
                                           std::uint64_t seed);

}  // namespace vskte
