#include <benchmark/benchmark.h>

#include "caddm/losses.hpp"
#include "caddm/nn/network.hpp"
#include "caddm/rng.hpp"

using namespace caddm;

namespace {

nn::Tensor random_input(uint64_t seed) {
  Rng rng(seed);
  nn::Tensor t(3, 112, 112);
  for (double& v : t.v) v = rng.normal();
  return t;
}

void BM_Forward(benchmark::State& state) {
  Network net{NetworkConfig{}};
  net.init(1);
  const nn::Tensor x = random_input(2);
  Network::Acts acts;
  ModelOutput out;
  for (auto _ : state) {
    net.forward(x, acts, out);
    benchmark::DoNotOptimize(out.image_logits);
  }
}
BENCHMARK(BM_Forward);

void BM_ForwardBackward(benchmark::State& state) {
  Network net{NetworkConfig{}};
  net.init(3);
  const nn::Tensor x = random_input(4);
  const std::vector<BoxXYXY> gt{{0.2, 0.2, 0.8, 0.8}};
  const DetectionTargets targets = match_anchors(net.anchors(), gt);

  Network::Acts acts;
  ModelOutput out;
  std::vector<double> grad(net.n_params());
  for (auto _ : state) {
    net.forward(x, acts, out);
    OutputGrads og;
    std::array<double, 2> cg{};
    classification_loss(out.image_logits, 1, &cg);
    og.image_logits = cg;
    std::vector<std::array<double, 2>> cgrads;
    std::vector<std::array<double, 4>> lgrads;
    confidence_loss(out.anchor_logits, targets, 3, 48, &cgrads);
    location_loss(out.anchor_offsets, targets, &lgrads);
    og.anchor_logits = std::move(cgrads);
    og.anchor_offsets = std::move(lgrads);
    std::fill(grad.begin(), grad.end(), 0.0);
    net.backward(acts, og, grad.data(), true);
    benchmark::DoNotOptimize(grad.data());
  }
}
BENCHMARK(BM_ForwardBackward);

}  // namespace
