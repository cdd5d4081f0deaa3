#include <benchmark/benchmark.h>

#include "geoml/rkhs.hpp"

namespace {

namespace rkhs = geoml::rkhs;
namespace kern = geoml::kern;

void BM_CrossGram(benchmark::State& state) {
  geoml::Rng rng(7);
  const geoml::Matrix x = rng.normal_matrix(8, state.range(0));
  const kern::KernelSpec k(kern::EuclideanGaussian{1.0});
  for (auto _ : state) benchmark::DoNotOptimize(kern::cross_gram(k, x, x));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CrossGram)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

void BM_Mmd(benchmark::State& state) {
  geoml::Rng rng(8);
  const rkhs::Sample a(rng.normal_matrix(2, state.range(0)));
  const rkhs::Sample b(rng.normal_matrix(2, state.range(0)));
  const kern::KernelSpec k(kern::EuclideanGaussian{1.0});
  for (auto _ : state) benchmark::DoNotOptimize(rkhs::mmd(k, a, b));
}
BENCHMARK(BM_Mmd)->RangeMultiplier(4)->Range(16, 1024);

void BM_LogHs(benchmark::State& state) {
  geoml::Rng rng(9);
  const rkhs::RegularizedCovariancePair pair{rng.normal_matrix(4, state.range(0)), rng.normal_matrix(4, state.range(0)),
                                             0.1, 0.2, kern::KernelSpec(kern::EuclideanGaussian{1.0})};
  for (auto _ : state) benchmark::DoNotOptimize(rkhs::loghs_cov_distance(pair));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LogHs)->RangeMultiplier(2)->Range(8, 256)->Complexity();

}  // namespace
