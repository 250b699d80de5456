#include "caddm/nn/network.hpp"

#include <cmath>
#include <stdexcept>

namespace caddm {

using nn::Tensor;

Network::Network(const NetworkConfig& cfg) : cfg_(cfg) {
  if (cfg.backbone_channels.size() != 4)
    throw std::invalid_argument("network: exactly four backbone stages expected");
  if (cfg.input_size != 112)
    throw std::invalid_argument("network: input size is fixed at 112");
  if (cfg.anchors.grids != std::vector<int>{7, 5, 3})
    throw std::invalid_argument("network: detection heads expect grids 7,5,3");

  anchors_ = build_anchors(cfg.anchors.grids, cfg.anchors.scales, cfg.anchors.ratios);

  size_t off = 0;
  auto add = [&](const std::string& name, std::vector<int> shape, size_t count) {
    infos_.push_back({name, std::move(shape), off, count});
    off += count;
    return off - count;
  };
  auto add_conv = [&](nn::Conv2d& c, const std::string& name, int in_c, int out_c, int k,
                      int stride, int pad) {
    c = {in_c, out_c, k, stride, pad, 0, 0};
    c.w_off = add(name + ".weight", {out_c, in_c, k, k}, c.w_count());
    c.b_off = add(name + ".bias", {out_c}, c.b_count());
  };

  int prev = 3;
  for (int i = 0; i < 4; ++i) {
    add_conv(backbone_[i], "backbone.stage" + std::to_string(i + 1), prev,
             cfg.backbone_channels[static_cast<size_t>(i)], 3, 2, 1);
    prev = cfg.backbone_channels[static_cast<size_t>(i)];
  }
  add_conv(extra_[0], "extra.conv1", prev, cfg.extra_channels, 1, 1, 0);
  for (int i = 1; i < 4; ++i)
    add_conv(extra_[i], "extra.conv" + std::to_string(i + 1), cfg.extra_channels,
             cfg.extra_channels, 3, 1, 0);

  for (int l = 0; l < 3; ++l) {
    const int v = anchors_.variants_per_level[static_cast<size_t>(l)];
    const std::string g = std::to_string(cfg.anchors.grids[static_cast<size_t>(l)]);
    add_conv(cls_head_[l], "head.g" + g + ".cls", cfg.extra_channels, v * 2, 3, 1, 1);
    add_conv(loc_head_[l], "head.g" + g + ".loc", cfg.extra_channels, v * 4, 3, 1, 1);
  }

  fc_.in_dim = cfg.extra_channels + cfg.backbone_channels.back();
  fc_.out_dim = 2;
  fc_.w_off = add("classifier.fc.weight", {2, fc_.in_dim}, fc_.w_count());
  fc_.b_off = add("classifier.fc.bias", {2}, fc_.b_count());

  params_.assign(off, 0.0);
}

void Network::init(uint64_t seed) {
  Rng rng(seed);
  auto fill_conv = [&](const nn::Conv2d& c) {
    const double bound = std::sqrt(6.0 / (static_cast<double>(c.in_c) * c.k * c.k));
    for (size_t i = 0; i < c.w_count(); ++i) params_[c.w_off + i] = rng.uniform(-bound, bound);
    for (size_t i = 0; i < c.b_count(); ++i) params_[c.b_off + i] = 0.0;
  };
  for (auto& c : backbone_) fill_conv(c);
  for (auto& c : extra_) fill_conv(c);
  for (int l = 0; l < 3; ++l) {
    fill_conv(cls_head_[l]);
    fill_conv(loc_head_[l]);
  }
  const double bound = std::sqrt(6.0 / fc_.in_dim);
  for (size_t i = 0; i < fc_.w_count(); ++i) params_[fc_.w_off + i] = rng.uniform(-bound, bound);
  for (size_t i = 0; i < fc_.b_count(); ++i) params_[fc_.b_off + i] = 0.0;
}

void Network::act_forward(const Tensor& z, Tensor& a) const {
  if (cfg_.identity_activation) {
    a = z;
    return;
  }
  nn::relu_forward(z, a);
}

void Network::act_backward(const Tensor& z, const Tensor& da, Tensor& dz) const {
  if (cfg_.identity_activation) {
    dz = da;
    return;
  }
  nn::relu_backward(z, da, dz);
}

void Network::forward(const Tensor& img, Acts& acts, ModelOutput& out) const {
  if (img.ch != 3 || img.h != cfg_.input_size || img.w != cfg_.input_size)
    throw std::invalid_argument("network: input must be 3x" + std::to_string(cfg_.input_size) +
                                "x" + std::to_string(cfg_.input_size));
  const double* p = params_.data();
  acts.x0 = img;
  const Tensor* cur = &acts.x0;
  for (int i = 0; i < 4; ++i) {
    backbone_[i].forward(p, *cur, acts.bz[i], acts.colbuf);
    act_forward(acts.bz[i], acts.ba[i]);
    cur = &acts.ba[i];
  }
  cur = &acts.ba[3];
  for (int i = 0; i < 4; ++i) {
    extra_[i].forward(p, *cur, acts.ez[i], acts.colbuf);
    act_forward(acts.ez[i], acts.ea[i]);
    cur = &acts.ea[i];
  }
  for (int l = 0; l < 3; ++l) {
    cls_head_[l].forward(p, acts.ea[l], acts.cls_out[l], acts.colbuf);
    loc_head_[l].forward(p, acts.ea[l], acts.loc_out[l], acts.colbuf);
  }

  nn::global_avg_pool(acts.ba[3], acts.gap);
  acts.feature.assign(acts.ea[3].v.begin(), acts.ea[3].v.end());
  acts.feature.insert(acts.feature.end(), acts.gap.begin(), acts.gap.end());
  fc_.forward(p, acts.feature, acts.image_logits);

  out.image_logits = {acts.image_logits[0], acts.image_logits[1]};
  out.feature.assign(acts.feature.begin(), acts.feature.end());
  out.anchor_logits.assign(anchors_.size(), {0, 0});
  out.anchor_offsets.assign(anchors_.size(), {0, 0, 0, 0});
  for (int l = 0; l < 3; ++l) {
    const int g = anchors_.grids[static_cast<size_t>(l)];
    const int v = anchors_.variants_per_level[static_cast<size_t>(l)];
    const size_t base = anchors_.level_offset[static_cast<size_t>(l)];
    for (int row = 0; row < g; ++row)
      for (int col = 0; col < g; ++col)
        for (int k = 0; k < v; ++k) {
          const size_t idx = base + (static_cast<size_t>(row) * g + col) * v + k;
          out.anchor_logits[idx] = {acts.cls_out[l].at(k * 2, row, col),
                                    acts.cls_out[l].at(k * 2 + 1, row, col)};
          for (int m = 0; m < 4; ++m)
            out.anchor_offsets[idx][static_cast<size_t>(m)] =
                acts.loc_out[l].at(k * 4 + m, row, col);
        }
  }
}

void Network::backward(const Acts& acts, const OutputGrads& og, double* grad,
                       bool include_heads) const {
  const double* p = params_.data();
  nn::AlignedVec colbuf;

  // Image-level branch.
  nn::AlignedVec dfeature;
  const nn::AlignedVec dlogits{og.image_logits[0], og.image_logits[1]};
  fc_.backward(p, acts.feature, dlogits, &dfeature, grad);

  Tensor d_ea[4];
  for (int i = 0; i < 4; ++i)
    d_ea[i].resize(acts.ea[i].ch, acts.ea[i].h, acts.ea[i].w);
  const size_t extra_count = acts.ea[3].size();
  for (size_t i = 0; i < extra_count; ++i) d_ea[3].v[i] = dfeature[i];

  Tensor d_ba3(acts.ba[3].ch, acts.ba[3].h, acts.ba[3].w);
  {
    nn::AlignedVec dgap(dfeature.begin() + static_cast<long>(extra_count), dfeature.end());
    nn::global_avg_pool_backward(dgap, d_ba3);
  }

  // Detection heads feed gradient into the pyramid maps.
  if (include_heads) {
    for (int l = 0; l < 3; ++l) {
      const int g = anchors_.grids[static_cast<size_t>(l)];
      const int v = anchors_.variants_per_level[static_cast<size_t>(l)];
      const size_t base = anchors_.level_offset[static_cast<size_t>(l)];
      Tensor d_cls(v * 2, g, g), d_loc(v * 4, g, g);
      for (int row = 0; row < g; ++row)
        for (int col = 0; col < g; ++col)
          for (int k = 0; k < v; ++k) {
            const size_t idx = base + (static_cast<size_t>(row) * g + col) * v + k;
            d_cls.at(k * 2, row, col) = og.anchor_logits[idx][0];
            d_cls.at(k * 2 + 1, row, col) = og.anchor_logits[idx][1];
            for (int m = 0; m < 4; ++m)
              d_loc.at(k * 4 + m, row, col) = og.anchor_offsets[idx][static_cast<size_t>(m)];
          }
      Tensor dx1, dx2;
      cls_head_[l].backward(p, acts.ea[l], d_cls, &dx1, grad, colbuf);
      loc_head_[l].backward(p, acts.ea[l], d_loc, &dx2, grad, colbuf);
      for (size_t i = 0; i < d_ea[l].size(); ++i) d_ea[l].v[i] += dx1.v[i] + dx2.v[i];
    }
  }

  // Extra chain, top down.
  Tensor dz, dx;
  for (int i = 3; i >= 0; --i) {
    act_backward(acts.ez[i], d_ea[i], dz);
    const Tensor& x = i == 0 ? acts.ba[3] : acts.ea[i - 1];
    extra_[i].backward(p, x, dz, &dx, grad, colbuf);
    if (i > 0)
      for (size_t k = 0; k < d_ea[i - 1].size(); ++k) d_ea[i - 1].v[k] += dx.v[k];
    else
      for (size_t k = 0; k < d_ba3.size(); ++k) d_ba3.v[k] += dx.v[k];
  }

  // Backbone.
  Tensor d_cur = d_ba3;
  for (int i = 3; i >= 0; --i) {
    act_backward(acts.bz[i], d_cur, dz);
    const Tensor& x = i == 0 ? acts.x0 : acts.ba[i - 1];
    if (i == 0) {
      backbone_[i].backward(p, x, dz, nullptr, grad, colbuf);
    } else {
      backbone_[i].backward(p, x, dz, &dx, grad, colbuf);
      d_cur = dx;
    }
  }
}

}  // namespace caddm
