#include <benchmark/benchmark.h>

#include "peerloc/math_util.hpp"
#include "peerloc/mixture_model.hpp"

namespace {

using namespace peerloc;

MixtureParams default_params() {
  MixtureParams p;
  p.alpha = 0.3;
  p.sigma_los = 0.05;
  p.sigma_nlos = 5.0;
  return p;
}

void BM_LogLosLikelihood(benchmark::State& state) {
  const ObservationModel model(default_params());
  double theta = 7.31;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.log_los(theta, 7.0));
    theta += 1e-9;
  }
}
BENCHMARK(BM_LogLosLikelihood);

void BM_LogNlosLikelihood(benchmark::State& state) {
  const ObservationModel model(default_params());
  double theta = 7.31;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.log_nlos(theta, 7.0));
    theta += 1e-9;
  }
}
BENCHMARK(BM_LogNlosLikelihood);

void BM_LogNdtrTail(benchmark::State& state) {
  double x = -30.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_ndtr(x));
    x -= 1e-9;
  }
}
BENCHMARK(BM_LogNdtrTail);

}  // namespace
