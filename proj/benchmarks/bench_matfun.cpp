#include <benchmark/benchmark.h>

#include "geoml/matfun.hpp"
#include "geoml/random.hpp"

namespace {

void BM_Logm(benchmark::State& state) {
  geoml::Rng rng(1);
  const auto p = geoml::random_spd(state.range(0), rng);
  for (auto _ : state) benchmark::DoNotOptimize(geoml::logm_spd(p));
}
BENCHMARK(BM_Logm)->RangeMultiplier(2)->Range(2, 64);

void BM_Sqrtm(benchmark::State& state) {
  geoml::Rng rng(2);
  const auto p = geoml::random_spd(state.range(0), rng);
  for (auto _ : state) benchmark::DoNotOptimize(geoml::sqrtm_spd(p));
}
BENCHMARK(BM_Sqrtm)->RangeMultiplier(2)->Range(2, 64);

void BM_Lyapunov(benchmark::State& state) {
  geoml::Rng rng(3);
  const auto n = state.range(0);
  const auto p = geoml::random_spd(n, rng);
  const auto v = geoml::random_sym(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(geoml::solve_lyapunov(p, v));
}
BENCHMARK(BM_Lyapunov)->RangeMultiplier(2)->Range(2, 64);

}  // namespace
