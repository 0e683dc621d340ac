#include <benchmark/benchmark.h>

#include "leadscore/assembly.hpp"
#include "leadscore/features.hpp"
#include "leadscore/metrics.hpp"
#include "leadscore/model.hpp"
#include "leadscore/simgen.hpp"

using namespace leadscore;

namespace {

SimOutput make_sim(int leads) {
  GeneratorConfig config;
  config.seed = 42;
  config.leads_per_quarter = leads;
  config.quarters = {Quarter{2013, 1}, Quarter{2013, 4}};
  return generate(config);
}

DesignMatrix make_matrix(const SimOutput& sim) {
  DataStore store;
  store.snapshots = sim.snapshots;
  store.outcomes = sim.outcomes;
  auto composed = compose_training_set(Quarter{2014, 1}, CompositionPolicy{}, store);
  EncoderConfig encoder;
  auto fit = fit_vocabulary(composed.set.rows, encoder);
  return build_design_matrix(composed.set.rows, fit.vocab, encoder);
}

void BM_LossAndGradient(benchmark::State& state) {
  auto sim = make_sim(static_cast<int>(state.range(0)));
  auto matrix = make_matrix(sim);
  std::size_t dim = 0;
  for (const auto& row : matrix.rows) {
    for (const auto& [col, v] : row.values) dim = std::max(dim, col + 1);
  }
  std::vector<double> w(dim, 0.01);
  for (auto _ : state) {
    auto lg = loss_and_gradient(w, 0.0, matrix.rows, matrix.labels, 0.001);
    benchmark::DoNotOptimize(lg.loss);
  }
  state.SetItemsProcessed(state.iterations() * matrix.rows.size());
}
BENCHMARK(BM_LossAndGradient)->Arg(200)->Arg(1000);

void BM_Encode(benchmark::State& state) {
  auto sim = make_sim(500);
  DataStore store;
  store.snapshots = sim.snapshots;
  store.outcomes = sim.outcomes;
  auto composed = compose_training_set(Quarter{2014, 1}, CompositionPolicy{}, store);
  EncoderConfig encoder;
  auto fit = fit_vocabulary(composed.set.rows, encoder);
  const auto& snap = composed.set.rows.front().snapshot;
  for (auto _ : state) {
    auto row = encode(snap, snap.week, fit.vocab, true);
    benchmark::DoNotOptimize(row.values.data());
  }
}
BENCHMARK(BM_Encode);

void BM_RocAuc(benchmark::State& state) {
  auto sim = make_sim(static_cast<int>(state.range(0)));
  const auto& batch = sim.snapshots.at(Quarter{2013, 1});
  auto scored = bayes_optimal_scores(sim.truth, batch);
  for (auto _ : state) {
    benchmark::DoNotOptimize(roc_auc(scored));
  }
  state.SetItemsProcessed(state.iterations() * scored.size());
}
BENCHMARK(BM_RocAuc)->Arg(500)->Arg(2000);

void BM_GainCurve(benchmark::State& state) {
  auto sim = make_sim(1000);
  const auto& batch = sim.snapshots.at(Quarter{2013, 1});
  auto scored = bayes_optimal_scores(sim.truth, batch);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gain_curve(scored).gain_score);
  }
}
BENCHMARK(BM_GainCurve);

void BM_Train(benchmark::State& state) {
  auto sim = make_sim(300);
  auto matrix = make_matrix(sim);
  std::size_t dim = 0;
  for (const auto& row : matrix.rows) {
    for (const auto& [col, v] : row.values) dim = std::max(dim, col + 1);
  }
  TrainConfig config;
  config.l2 = 1.0;
  config.max_iterations = 50;
  config.tolerance = 1e-12;
  for (auto _ : state) {
    auto result = minimize_logistic(matrix.rows, matrix.labels, dim, config);
    benchmark::DoNotOptimize(result.intercept);
  }
}
BENCHMARK(BM_Train);

}  // namespace

BENCHMARK_MAIN();
