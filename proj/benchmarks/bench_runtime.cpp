#include <benchmark/benchmark.h>

#include "peerloc/runtime.hpp"

namespace {

using namespace peerloc;

/// Full-epoch cost on a mid-size world, single worker vs several.
void BM_EpochStep(benchmark::State& state) {
  ScenarioConfig c;
  c.n_mobile = 10;
  c.n_anchor = 12;
  c.grid_width = 60.0;
  c.grid_height = 25.0;
  c.n_steps = 200;
  c.particle_count = 400;
  c.seed = 9;
  const Scenario scenario = generate_scenario(c);

  RunConfig rc;
  rc.workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    state.PauseTiming();
    Runner runner(scenario, rc);
    state.ResumeTiming();
    for (int t = 1; t <= 20; ++t) {
      benchmark::DoNotOptimize(runner.step_epoch(t).measurement_count);
    }
  }
}
BENCHMARK(BM_EpochStep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_NeighborDiscovery(benchmark::State& state) {
  Rng rng(3, StreamTag::kTest);
  std::vector<Vec2> pos;
  for (int i = 0; i < 1000; ++i) {
    pos.push_back({rng.uniform(0.0, 200.0), rng.uniform(0.0, 50.0)});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(neighbor_discovery(pos, 10.0).size());
  }
}
BENCHMARK(BM_NeighborDiscovery);

}  // namespace
