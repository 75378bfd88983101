// OpenMP kernels against their serial references, and cached versus naive
// stabilization weights.

#include <random>

#include <benchmark/benchmark.h>

#include "vskte/adaptive_sim.hpp"
#include "vskte/kte_test.hpp"
#include "vskte/parallel_kernels.hpp"
#include "vskte/reference.hpp"
#include "vskte/scenarios.hpp"

namespace {

using vskte::Matrix;

Matrix points(long n, long d) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  Matrix m(n, d);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = z(rng);
  return m;
}

void BM_SqDistancesParallel(benchmark::State& s) {
  Matrix x = points(s.range(0), s.range(1));
  for (auto _ : s) benchmark::DoNotOptimize(vskte::parallel::symmetric_sq_distances(x));
}

void BM_SqDistancesSerial(benchmark::State& s) {
  Matrix x = points(s.range(0), s.range(1));
  for (auto _ : s) benchmark::DoNotOptimize(vskte::reference::symmetric_sq_distances(x));
}

void BM_GaussianParallel(benchmark::State& s) {
  Matrix sq = vskte::reference::symmetric_sq_distances(points(s.range(0), 5));
  for (auto _ : s) benchmark::DoNotOptimize(vskte::parallel::gaussian_from_sq(sq, 1.3));
}

void BM_GaussianSerial(benchmark::State& s) {
  Matrix sq = vskte::reference::symmetric_sq_distances(points(s.range(0), 5));
  for (auto _ : s) benchmark::DoNotOptimize(vskte::reference::gaussian_from_sq(sq, 1.3));
}

struct Fold {
  vskte::PreparedData data;
  vskte::FoldArtifacts fold;
  std::vector<int> actions;
  std::vector<double> treated;
  Matrix kyy;

  explicit Fold(std::size_t T) {
    vskte::ScenarioSpec spec;
    spec.scenario = vskte::Scenario::III;
    auto env = vskte::make_synthetic_env(spec, 3);
    vskte::Trajectory traj = vskte::run_eps_greedy(*env, T, {}, 4);
    vskte::TestConfig cfg;
    data = vskte::prepare(traj, vskte::FoldSplit::make(vskte::SplitMode::alternating, T), cfg.kernels);
    fold = vskte::build_fold(data, 0, cfg, false);
    for (auto t : data.split[0]) {
      actions.push_back(data.actions[t]);
      treated.push_back(data.treated[t]);
    }
    kyy = vskte::submatrix(data.ky, fold.ops.basis, fold.ops.basis);
  }
  vskte::FoldWeightInputs inputs() const {
    return {&fold.ops, &kyy, actions, treated, &data.fold_propensities[0]};
  }
};

void BM_WeightSeriesCached(benchmark::State& s) {
  Fold f(static_cast<std::size_t>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(vskte::weight_series(f.inputs(), {}));
}

void BM_WeightSeriesNaive(benchmark::State& s) {
  Fold f(static_cast<std::size_t>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(vskte::reference::weight_series(f.inputs(), {}));
}

BENCHMARK(BM_SqDistancesParallel)->Args({500, 5})->Args({1000, 5})->Args({600, 1024})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SqDistancesSerial)->Args({500, 5})->Args({1000, 5})->Args({600, 1024})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GaussianParallel)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GaussianSerial)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WeightSeriesCached)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WeightSeriesNaive)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
