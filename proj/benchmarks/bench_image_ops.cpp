#include <benchmark/benchmark.h>

#include "caddm/blend.hpp"
#include "caddm/dssim.hpp"
#include "caddm/integral.hpp"
#include "caddm/mfs.hpp"
#include "caddm/rng.hpp"

using namespace caddm;

namespace {

Image random_image(int h, int w, uint64_t seed) {
  Rng rng(seed);
  Image img(h, w);
  for (double& v : img.data) v = rng.uniform();
  return img;
}

void BM_DssimMap(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Image a = random_image(n, n, 1);
  const Image b = random_image(n, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(dssim_map(a, b));
}
BENCHMARK(BM_DssimMap)->Arg(112)->Arg(224);

void BM_SummedAreaTable(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(3);
  Plane m(n, n);
  for (double& v : m.values) v = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(SummedAreaTable(m));
}
BENCHMARK(BM_SummedAreaTable)->Arg(112)->Arg(512);

void BM_SelectWindow(benchmark::State& state) {
  Rng rng(4);
  Plane m(112, 112);
  for (double& v : m.values) v = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(select_window(m, 40, 60));
}
BENCHMARK(BM_SelectWindow);

void BM_PoissonBlend(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Image f = random_image(112, 112, 5);
  const Image s = random_image(112, 112, 6);
  Mask m(112, 112, 0.0);
  const int lo = (112 - n) / 2;
  for (int y = lo; y < lo + n; ++y)
    for (int x = lo; x < lo + n; ++x) m.at(y, x) = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(poisson_blend(f, s, m));
}
BENCHMARK(BM_PoissonBlend)->Arg(24)->Arg(48)->Arg(80);

void BM_MfsSample(benchmark::State& state) {
  const Image f = random_image(112, 112, 7);
  const Image s = random_image(112, 112, 8);
  const MfsConfig cfg;
  uint64_t i = 0;
  for (auto _ : state) {
    Rng rng(i++);
    benchmark::DoNotOptimize(mfs_sample(f, s, cfg, rng));
  }
}
BENCHMARK(BM_MfsSample);

}  // namespace
