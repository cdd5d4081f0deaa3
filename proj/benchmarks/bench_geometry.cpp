#include <benchmark/benchmark.h>

#include "geoml/divergences.hpp"
#include "geoml/kernels.hpp"
#include "geoml/spd_geometry.hpp"

namespace {

namespace spd = geoml::spd;

template <spd::Metric M>
void BM_Distance(benchmark::State& state) {
  geoml::Rng rng(4);
  const auto a = geoml::random_spd(state.range(0), rng);
  const auto b = geoml::random_spd(state.range(0), rng);
  for (auto _ : state) benchmark::DoNotOptimize(spd::distance(M, a, b));
}
BENCHMARK(BM_Distance<spd::Metric::AffineInvariant>)->Arg(3)->Arg(16)->Arg(64);
BENCHMARK(BM_Distance<spd::Metric::BuresWasserstein>)->Arg(3)->Arg(16)->Arg(64);
BENCHMARK(BM_Distance<spd::Metric::LogEuclidean>)->Arg(3)->Arg(16)->Arg(64);

void BM_AlphaLogdet(benchmark::State& state) {
  geoml::Rng rng(5);
  const auto a = geoml::random_spd(state.range(0), rng);
  const auto b = geoml::random_spd(state.range(0), rng);
  const geoml::div::AlphaParam al(0.3);
  for (auto _ : state) benchmark::DoNotOptimize(geoml::div::alpha_logdet(al, a, b));
}
BENCHMARK(BM_AlphaLogdet)->Arg(3)->Arg(16)->Arg(64);

void BM_SpdGram(benchmark::State& state) {
  geoml::Rng rng(6);
  std::vector<geoml::SpdMatrix> pts;
  for (int i = 0; i < state.range(0); ++i) pts.push_back(geoml::random_spd(3, rng));
  const geoml::kern::KernelSpec k(geoml::kern::LogEExp{1.0});
  for (auto _ : state) benchmark::DoNotOptimize(geoml::kern::gram(k, pts));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SpdGram)->RangeMultiplier(2)->Range(8, 128)->Complexity();

}  // namespace
