#include "vskte/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "vskte/errors.hpp"

namespace vskte {

OutcomeModel parse_outcome_model(const std::string& name) {
  if (name == "cosine") return OutcomeModel::cosine;
  if (name == "linear") return OutcomeModel::linear;
  if (name == "sigmoid") return OutcomeModel::sigmoid;
  fail(ErrorKind::input, "unknown outcome model '" + name + "' (cosine, linear, sigmoid)");
}

Scenario parse_scenario(const std::string& name) {
  if (name == "I") return Scenario::I;
  if (name == "II") return Scenario::II;
  if (name == "III") return Scenario::III;
  if (name == "IV") return Scenario::IV;
  fail(ErrorKind::input, "unknown scenario '" + name + "' (I, II, III, IV)");
}

const char* to_string(OutcomeModel m) {
  switch (m) {
    case OutcomeModel::cosine: return "cosine";
    case OutcomeModel::linear: return "linear";
    case OutcomeModel::sigmoid: return "sigmoid";
  }
  return "?";
}

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::I: return "I";
    case Scenario::II: return "II";
    case Scenario::III: return "III";
    case Scenario::IV: return "IV";
  }
  return "?";
}

double outcome_mean(OutcomeModel model, double z) {
  switch (model) {
    case OutcomeModel::cosine: return std::cos(z);
    case OutcomeModel::linear: return z;
    case OutcomeModel::sigmoid: {
      double sign = z > 0.5 ? 1.0 : (z < 0.5 ? -1.0 : 0.0);
      return std::log(std::abs(16.0 * z - 8.0) + 1.0) * sign;
    }
  }
  return 0.0;
}

double draw_effect(Scenario s, Rng& rng) {
  switch (s) {
    case Scenario::I: return 0.0;
    case Scenario::II: return 2.0;
    case Scenario::III: return std::bernoulli_distribution(0.5)(rng) ? 2.0 : -2.0;
    case Scenario::IV: return std::uniform_real_distribution<double>(-4.0, 4.0)(rng);
  }
  return 0.0;
}

namespace {

void validate(const ScenarioSpec& spec) {
  if (spec.d == 0) fail(ErrorKind::input, "covariate dimension must be positive");
  if (static_cast<std::size_t>(spec.beta.size()) != spec.d)
    fail(ErrorKind::input, "beta length does not match d");
  if (!(spec.noise_sd > 0.0)) fail(ErrorKind::input, "noise_sd must be positive");
}

nlohmann::json scenario_json(const ScenarioSpec& spec) {
  return {{"model", to_string(spec.model)},
          {"scenario", to_string(spec.scenario)},
          {"d", spec.d},
          {"beta", std::vector<double>(spec.beta.data(), spec.beta.data() + spec.beta.size())},
          {"noise_sd", spec.noise_sd}};
}

// Potential outcomes for a given context: shared noise and shared effect draw.
PotentialOutcomes outcomes_for(const ScenarioSpec& spec, Vector x, Rng& rng) {
  double f = outcome_mean(spec.model, spec.beta.dot(x));
  double noise = std::normal_distribution<double>(0.0, spec.noise_sd)(rng);
  double delta = draw_effect(spec.scenario, rng);
  PotentialOutcomes po;
  po.x = std::move(x);
  po.y0 = Vector::Constant(1, f + noise);
  po.y1 = Vector::Constant(1, f + delta + noise);
  return po;
}

class SyntheticEnv final : public Environment {
 public:
  SyntheticEnv(ScenarioSpec spec, std::uint64_t seed) : spec_(std::move(spec)), rng_(seed) {}

  PotentialOutcomes draw() override {
    std::normal_distribution<double> normal;
    Vector x(spec_.d);
    for (std::size_t i = 0; i < spec_.d; ++i) x(i) = normal(rng_);
    return outcomes_for(spec_, std::move(x), rng_);
  }
  std::size_t context_dim() const override { return spec_.d; }
  std::size_t outcome_dim() const override { return 1; }
  nlohmann::json descriptor() const override {
    nlohmann::json j = scenario_json(spec_);
    j["kind"] = "synthetic";
    return j;
  }

 private:
  ScenarioSpec spec_;
  Rng rng_;
};

// Positions in [0, 1.15] land in [0.15, 0.84] of the grid side.
constexpr double kPlacementOffset = 0.15;
constexpr double kPlacementSpan = 0.6;

class ImageEnv final : public Environment {
 public:
  ImageEnv(ImageEnvSpec spec, std::uint64_t seed) : spec_(spec), rng_(seed) {}

  PotentialOutcomes draw() override {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    PotentialOutcomes po;
    po.x = Vector(2);
    po.x(0) = unif(rng_);
    po.x(1) = unif(rng_);
    po.y0 = render_blob(spec_, po.x(0), po.x(1));
    po.y1 = render_blob(spec_, po.x(0) + spec_.shift_delta, po.x(1));
    std::normal_distribution<double> noise(0.0, spec_.pixel_noise_sd);
    for (Eigen::Index i = 0; i < po.y0.size(); ++i) {
      double e = noise(rng_);
      po.y0(i) = std::clamp(po.y0(i) + e, 0.0, 1.0);
      po.y1(i) = std::clamp(po.y1(i) + e, 0.0, 1.0);
    }
    return po;
  }
  std::size_t context_dim() const override { return 2; }
  std::size_t outcome_dim() const override { return spec_.grid * spec_.grid; }
  nlohmann::json descriptor() const override {
    return {{"kind", "image"},
            {"grid", spec_.grid},
            {"shift", spec_.shift_delta},
            {"pixel_noise_sd", spec_.pixel_noise_sd},
            {"blob_scale", spec_.blob_scale}};
  }

 private:
  ImageEnvSpec spec_;
  Rng rng_;
};

class PoolEnv final : public Environment {
 public:
  PoolEnv(const CovariatePool& pool, ScenarioSpec overlay, std::uint64_t seed)
      : pool_(&pool), spec_(std::move(overlay)), rng_(seed), order_(pool.rows.rows()) {
    std::iota(order_.begin(), order_.end(), 0);
    std::shuffle(order_.begin(), order_.end(), rng_);
  }

  PotentialOutcomes draw() override {
    if (next_ >= order_.size()) fail(ErrorKind::input, "covariate pool exhausted");
    Vector x = pool_->rows.row(order_[next_++]).transpose();
    return outcomes_for(spec_, std::move(x), rng_);
  }
  std::size_t context_dim() const override { return spec_.d; }
  std::size_t outcome_dim() const override { return 1; }
  nlohmann::json descriptor() const override {
    nlohmann::json j = scenario_json(spec_);
    j["kind"] = "pool";
    j["pool_rows"] = pool_->rows.rows();
    return j;
  }

 private:
  const CovariatePool* pool_;
  ScenarioSpec spec_;
  Rng rng_;
  std::vector<Eigen::Index> order_;
  std::size_t next_ = 0;
};

}  // namespace

std::unique_ptr<Environment> make_synthetic_env(const ScenarioSpec& spec, std::uint64_t seed) {
  validate(spec);
  return std::make_unique<SyntheticEnv>(spec, seed);
}

Vector render_blob(const ImageEnvSpec& spec, double px, double py) {
  const std::size_t g = spec.grid;
  const double sigma = spec.blob_scale * static_cast<double>(g);
  const double cx = (kPlacementOffset + kPlacementSpan * px) * static_cast<double>(g);
  const double cy = (kPlacementOffset + kPlacementSpan * py) * static_cast<double>(g);
  Vector img(g * g);
  for (std::size_t r = 0; r < g; ++r) {
    for (std::size_t c = 0; c < g; ++c) {
      double dx = static_cast<double>(c) + 0.5 - cx;
      double dy = static_cast<double>(r) + 0.5 - cy;
      img(r * g + c) = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    }
  }
  return img;
}

std::unique_ptr<Environment> make_image_env(const ImageEnvSpec& spec, std::uint64_t seed) {
  if (spec.grid < 8) fail(ErrorKind::input, "image grid must be at least 8");
  if (!(spec.pixel_noise_sd >= 0.0) || !(spec.blob_scale > 0.0))
    fail(ErrorKind::input, "invalid image noise or blob scale");
  if (kPlacementOffset + kPlacementSpan * (1.0 + spec.shift_delta) > 1.0 ||
      kPlacementOffset + kPlacementSpan * spec.shift_delta < 0.0)
    fail(ErrorKind::input, "shift would move the blob centre off the grid");
  return std::make_unique<ImageEnv>(spec, seed);
}

CovariatePool parse_covariate_csv(const std::string& text, bool standardize) {
  std::istringstream in(text);
  std::string line;
  CovariatePool pool;
  if (!std::getline(in, line)) fail(ErrorKind::parse, "CSV is empty (expected a header row)");
  {
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) pool.header.push_back(cell);
  }
  const std::size_t width = pool.header.size();
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ls, cell, ',')) {
      ++col;
      char* end = nullptr;
      double v = std::strtod(cell.c_str(), &end);
      while (end && *end == ' ') ++end;
      if (cell.empty() || end == cell.c_str() || *end != '\0')
        fail(ErrorKind::parse, "non-numeric cell at row " + std::to_string(line_no) + ", column " +
                                   std::to_string(col) + ": '" + cell + "'");
      row.push_back(v);
    }
    if (!line.empty() && line.back() == ',') ++col;
    if (row.size() != width || col != width)
      fail(ErrorKind::parse, "row " + std::to_string(line_no) + " has " + std::to_string(col) +
                                 " cells, header has " + std::to_string(width));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorKind::parse, "CSV has no data rows");
  pool.rows.resize(rows.size(), width);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j) pool.rows(i, j) = rows[i][j];
  if (standardize) {
    for (std::size_t j = 0; j < width; ++j) {
      auto col = pool.rows.col(j);
      double mean = col.mean();
      col.array() -= mean;
      double sd = std::sqrt(col.squaredNorm() / static_cast<double>(col.size()));
      if (sd > 0.0) col /= sd;
    }
  }
  return pool;
}

CovariatePool load_covariate_pool(const std::string& path, bool standardize) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::input, "cannot open covariate CSV '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_covariate_csv(buffer.str(), standardize);
}

std::unique_ptr<Environment> make_pool_env(const CovariatePool& pool, ScenarioSpec overlay,
                                           std::uint64_t seed) {
  overlay.d = pool.rows.cols();
  if (static_cast<std::size_t>(overlay.beta.size()) != overlay.d) overlay.beta = Vector::Ones(overlay.d);
  validate(overlay);
  return std::make_unique<PoolEnv>(pool, std::move(overlay), seed);
}

}  // namespace vskte
