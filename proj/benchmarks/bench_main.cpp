#include <benchmark/benchmark.h>

#include "omsim/classical.hpp"
#include "omsim/covariance.hpp"

using namespace omsim;

namespace {

const Model& reference() {
  static const Model m = Model::make(SystemParams{});
  return m;
}

void BM_ClassicalStep(benchmark::State& state) {
  const Model& m = reference();
  const ClassicalSystem sys(m);
  const double dt = IntegrationConfig::defaults_for(m).dt;
  ClassicalState s = resting_state(m, 0.3 * m.scales.lambda_n);
  for (auto _ : state) {
    s = advance(s, sys, dt, 1000);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_ClassicalStep);

void BM_CoSimulation(benchmark::State& state) {
  const Model& m = reference();
  CoSimConfig cfg = CoSimConfig::defaults_for(m);
  cfg.duration = 1000 * cfg.dt;
  cfg.sample_stride = 1000;
  const auto start = resting_state(m, 0.3 * m.scales.lambda_n);
  const auto v0 = initial_covariance(m.scales);
  for (auto _ : state) {
    auto out = cosimulate(start, v0, m, cfg);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_CoSimulation);

void BM_LogNegativity(benchmark::State& state) {
  const auto v = tmsv_covariance(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(log_negativity(v));
}
BENCHMARK(BM_LogNegativity);

void BM_DriftAssembly(benchmark::State& state) {
  const Model& m = reference();
  const ClassicalState s{0, m.params.q_s + 0.01 * m.scales.lambda_n, 0, {1e4, -2e4}};
  for (auto _ : state) benchmark::DoNotOptimize(assemble_drift(s, m));
}
BENCHMARK(BM_DriftAssembly);

}  // namespace

BENCHMARK_MAIN();
