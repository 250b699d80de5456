#include <benchmark/benchmark.h>

#include "caddm/anchors.hpp"
#include "caddm/nn/network.hpp"
#include "caddm/rng.hpp"

using namespace caddm;

namespace {

void BM_BuildAnchors(benchmark::State& state) {
  const AnchorConfig cfg;
  for (auto _ : state)
    benchmark::DoNotOptimize(build_anchors(cfg.grids, cfg.scales, cfg.ratios));
}
BENCHMARK(BM_BuildAnchors);

void BM_MatchAnchors(benchmark::State& state) {
  const AnchorConfig cfg;
  const AnchorSet anchors = build_anchors(cfg.grids, cfg.scales, cfg.ratios);
  Rng rng(1);
  std::vector<BoxXYXY> gt;
  for (int j = 0; j < static_cast<int>(state.range(0)); ++j) {
    const double x0 = rng.uniform(0, 0.5), y0 = rng.uniform(0, 0.5);
    gt.push_back({x0, y0, x0 + rng.uniform(0.2, 0.5), y0 + rng.uniform(0.2, 0.5)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(match_anchors(anchors, gt));
}
BENCHMARK(BM_MatchAnchors)->Arg(1)->Arg(4);

void BM_Nms(benchmark::State& state) {
  Rng rng(2);
  std::vector<BoxXYXY> boxes;
  std::vector<double> scores;
  for (int i = 0; i < static_cast<int>(state.range(0)); ++i) {
    const double x0 = rng.uniform(0, 0.8), y0 = rng.uniform(0, 0.8);
    boxes.push_back({x0, y0, x0 + rng.uniform(0.05, 0.2), y0 + rng.uniform(0.05, 0.2)});
    scores.push_back(rng.uniform());
  }
  for (auto _ : state) benchmark::DoNotOptimize(nms(boxes, scores, 0.5));
}
BENCHMARK(BM_Nms)->Arg(128)->Arg(730);

}  // namespace
