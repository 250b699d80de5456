#pragma once

#include <array>
#include <string>
#include <vector>

#include "caddm/anchors.hpp"
#include "caddm/nn/layers.hpp"
#include "caddm/rng.hpp"

namespace caddm {

// Default-box layout of the detection heads. Scales are per level
// (grids 7, 5, 3); ratios are shared. The level-3 list is deliberately
// dense: whole-face swap boxes must find an anchor above the strict 0.9
// matching threshold, and that needs size steps of about 5%.
struct AnchorConfig {
  std::vector<int> grids{7, 5, 3};
  std::vector<std::vector<double>> scales{
      {0.25},
      {0.45},
      {0.70, 0.74, 0.78, 0.82, 0.86, 0.90, 0.95, 1.0}};
  std::vector<double> ratios{0.81, 0.9, 1.0, 1.11, 1.235};
};

struct NetworkConfig {
  int input_size = 112;  // four stride-2 stages land on a 7x7 map
  std::vector<int> backbone_channels{16, 32, 64, 128};
  int extra_channels = 64;
  bool identity_activation = false;  // linearized configuration for tests
  AnchorConfig anchors;
};

struct ModelOutput {
  std::vector<std::array<double, 2>> anchor_logits;
  std::vector<std::array<double, 4>> anchor_offsets;
  std::array<double, 2> image_logits{0, 0};
  std::vector<double> feature;  // pre-classifier concat: 1x1 map then pooled backbone
};

struct OutputGrads {
  std::vector<std::array<double, 2>> anchor_logits;
  std::vector<std::array<double, 4>> anchor_offsets;
  std::array<double, 2> image_logits{0, 0};
};

struct ParamInfo {
  std::string name;
  std::vector<int> shape;
  size_t offset = 0;
  size_t count = 0;
};

// Backbone + artifact-detection pyramid.
//
// Backbone: four 3x3 stride-2 conv stages, 112 -> 7. Extra layers: a 1x1
// conv then three valid 3x3 convs shrinking 7 -> 5 -> 3 -> 1. Detection
// heads (class + offset convs) sit on the 7/5/3 maps; the 1x1 map is
// concatenated with the global-average-pooled backbone output and passed
// through one fully connected layer for the image-level prediction.
//
// Weights live in one flat vector; forward/backward never mutate them, so
// a single Network can serve several worker threads, each with its own
// Acts scratch and gradient buffer.
class Network {
 public:
  explicit Network(const NetworkConfig& cfg);

  // Kaiming-style uniform fan-in initialization, zero biases.
  void init(uint64_t seed);

  const NetworkConfig& config() const { return cfg_; }
  const AnchorSet& anchors() const { return anchors_; }
  size_t n_params() const { return params_.size(); }
  nn::AlignedVec& params() { return params_; }
  const nn::AlignedVec& params() const { return params_; }
  const std::vector<ParamInfo>& param_infos() const { return infos_; }

  struct Acts {
    nn::Tensor x0;
    nn::Tensor bz[4], ba[4];
    nn::Tensor ez[4], ea[4];
    nn::Tensor cls_out[3], loc_out[3];
    nn::AlignedVec gap, feature, image_logits;
    nn::AlignedVec colbuf;
  };

  void forward(const nn::Tensor& img, Acts& acts, ModelOutput& out) const;

  // Accumulates into grad (size n_params()). include_heads=false detaches
  // the detection heads entirely (the binary-classifier training mode).
  void backward(const Acts& acts, const OutputGrads& og, double* grad,
                bool include_heads = true) const;

 private:
  void act_forward(const nn::Tensor& z, nn::Tensor& a) const;
  void act_backward(const nn::Tensor& z, const nn::Tensor& da, nn::Tensor& dz) const;

  NetworkConfig cfg_;
  AnchorSet anchors_;
  nn::Conv2d backbone_[4];
  nn::Conv2d extra_[4];
  nn::Conv2d cls_head_[3], loc_head_[3];
  nn::Linear fc_;
  nn::AlignedVec params_;
  std::vector<ParamInfo> infos_;
};

}  // namespace caddm
