#include <benchmark/benchmark.h>

#include "peerloc/particle_filter.hpp"

namespace {

using namespace peerloc;

MixtureParams default_params() {
  MixtureParams p;
  p.alpha = 0.3;
  p.sigma_los = 0.05;
  p.sigma_nlos = 5.0;
  return p;
}

void BM_BeliefForwardStep(benchmark::State& state) {
  const LosTransition trans = transition_from_alpha(0.3, 0.15);
  NeighborBelief b{std::log(0.7), std::log(0.3)};
  for (auto _ : state) {
    const NeighborBelief out = belief_forward_step(b, -2.3, -1.1, trans);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_BeliefForwardStep);

/// One epoch's worth of belief updates for a 900-particle cloud and the
/// given neighbor count.
void BM_MeasurementUpdate(benchmark::State& state) {
  const MixtureParams params = default_params();
  const LosTransition trans = transition_from_alpha(params.alpha, 0.15);
  FilterConfig config;
  config.particle_count = 900;
  const int n_neighbors = static_cast<int>(state.range(0));

  Rng rng(1, StreamTag::kTest);
  FilterState base = init_filter(0, {5.0, 5.0}, config, rng);
  std::vector<NeighborObservation> obs;
  for (int j = 0; j < n_neighbors; ++j) {
    const Vec2 pos{5.0 + 3.0 * std::cos(j * 0.7), 5.0 + 3.0 * std::sin(j * 0.7)};
    obs.push_back({j + 1, distance({5.0, 5.0}, pos) + 0.02 * j, pos});
  }
  int t = 0;
  for (auto _ : state) {
    state.PauseTiming();
    FilterState s = base;  // fresh beliefs each round
    state.ResumeTiming();
    measurement_update(s, ++t, obs, trans, params, config);
    benchmark::DoNotOptimize(s.particles.front().log_weight);
    t = 0;
  }
}
BENCHMARK(BM_MeasurementUpdate)->Arg(4)->Arg(12);

void BM_SystematicResample(benchmark::State& state) {
  FilterConfig config;
  config.particle_count = 900;
  config.ess_threshold = 1.0;  // always trigger
  Rng rng(2, StreamTag::kTest);
  FilterState base = init_filter(0, {0.0, 0.0}, config, rng);
  for (int i = 0; i < 900; ++i) {
    base.particles[i].log_weight = -std::log(900.0) + 0.002 * (i % 37);
  }
  // Normalize once.
  double sum = 0.0;
  for (auto& p : base.particles) sum += std::exp(p.log_weight);
  for (auto& p : base.particles) p.log_weight -= std::log(sum);

  for (auto _ : state) {
    state.PauseTiming();
    FilterState s = base;
    state.ResumeTiming();
    benchmark::DoNotOptimize(maybe_resample(s, config, rng));
  }
}
BENCHMARK(BM_SystematicResample);

}  // namespace
