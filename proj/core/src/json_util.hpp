#pragma once

// Internal JSON helpers shared by checkpoint, config and CLI-facing IO.
// Not installed; public headers stay free of the JSON dependency.

#include <set>
#include <string>

#include <json.hpp>

#include "caddm/augment.hpp"
#include "caddm/checkpoint.hpp"
#include "caddm/errors.hpp"
#include "caddm/mfs.hpp"
#include "caddm/nn/network.hpp"

namespace caddm::detail {

using nlohmann::json;

// Rejects unknown keys so config typos fail loudly, naming the key.
inline void strict_keys(const json& j, const std::set<std::string>& allowed,
                        const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "config: '" + path + "' must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) {
      const std::string full = path.empty() ? key : path + "." + key;
      throw ConfigError(full, "config: unknown key '" + full + "'");
    }
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, const T& fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    const std::string full = path.empty() ? key : path + "." + key;
    throw ConfigError(full, "config: bad value type for '" + full + "'");
  }
}

inline json anchor_config_to_json(const AnchorConfig& a) {
  return json{{"grids", a.grids}, {"scales", a.scales}, {"ratios", a.ratios}};
}

inline AnchorConfig anchor_config_from_json(const json& j, const std::string& path) {
  strict_keys(j, {"grids", "scales", "ratios"}, path);
  AnchorConfig a;
  a.grids = get_or(j, "grids", a.grids, path);
  a.scales = get_or(j, "scales", a.scales, path);
  a.ratios = get_or(j, "ratios", a.ratios, path);
  return a;
}

inline json network_config_to_json(const NetworkConfig& c) {
  return json{{"input_size", c.input_size},
              {"backbone_channels", c.backbone_channels},
              {"extra_channels", c.extra_channels},
              {"identity_activation", c.identity_activation},
              {"anchors", anchor_config_to_json(c.anchors)}};
}

inline NetworkConfig network_config_from_json(const json& j, const std::string& path) {
  strict_keys(j, {"input_size", "backbone_channels", "extra_channels",
                  "identity_activation", "anchors"},
              path);
  NetworkConfig c;
  c.input_size = get_or(j, "input_size", c.input_size, path);
  c.backbone_channels = get_or(j, "backbone_channels", c.backbone_channels, path);
  c.extra_channels = get_or(j, "extra_channels", c.extra_channels, path);
  c.identity_activation = get_or(j, "identity_activation", c.identity_activation, path);
  if (j.contains("anchors")) c.anchors = anchor_config_from_json(j.at("anchors"), path + ".anchors");
  return c;
}

inline json dataset_stats_to_json(const DatasetStats& s) {
  return json{{"mean", s.mean}, {"stdev", s.stdev}};
}

inline DatasetStats dataset_stats_from_json(const json& j, const std::string& path) {
  strict_keys(j, {"mean", "stdev"}, path);
  DatasetStats s;
  s.mean = get_or(j, "mean", s.mean, path);
  s.stdev = get_or(j, "stdev", s.stdev, path);
  return s;
}

inline json augment_config_to_json(const AugmentConfig& a) {
  return json{{"enabled", a.enabled},
              {"crop_fraction_range", a.crop_fraction_range},
              {"blur_sigma_range", a.blur_sigma_range},
              {"noise_sigma_range", a.noise_sigma_range},
              {"jpeg_quality_range", a.jpeg_quality_range},
              {"p_apply", a.p_apply}};
}

inline AugmentConfig augment_config_from_json(const json& j, const std::string& path) {
  strict_keys(j, {"enabled", "crop_fraction_range", "blur_sigma_range",
                  "noise_sigma_range", "jpeg_quality_range", "p_apply"},
              path);
  AugmentConfig a;
  a.enabled = get_or(j, "enabled", a.enabled, path);
  a.crop_fraction_range = get_or(j, "crop_fraction_range", a.crop_fraction_range, path);
  a.blur_sigma_range = get_or(j, "blur_sigma_range", a.blur_sigma_range, path);
  a.noise_sigma_range = get_or(j, "noise_sigma_range", a.noise_sigma_range, path);
  a.jpeg_quality_range = get_or(j, "jpeg_quality_range", a.jpeg_quality_range, path);
  a.p_apply = get_or(j, "p_apply", a.p_apply, path);
  return a;
}

inline json mfs_config_to_json(const MfsConfig& m) {
  return json{{"p_global", m.p_global},
              {"scale_buckets", m.scale_buckets},
              {"p_poisson", m.p_poisson},
              {"global_axis_range", std::array<double, 2>{m.global_axis_lo, m.global_axis_hi}},
              {"global_sigma_range", std::array<double, 2>{m.global_sigma_lo, m.global_sigma_hi}}};
}

inline MfsConfig mfs_config_from_json(const json& j, const std::string& path) {
  strict_keys(j, {"p_global", "scale_buckets", "p_poisson", "global_axis_range",
                  "global_sigma_range", "enabled"},
              path);
  MfsConfig m;
  m.p_global = get_or(j, "p_global", m.p_global, path);
  m.scale_buckets = get_or(j, "scale_buckets", m.scale_buckets, path);
  m.p_poisson = get_or(j, "p_poisson", m.p_poisson, path);
  const auto ax = get_or(j, "global_axis_range",
                         std::array<double, 2>{m.global_axis_lo, m.global_axis_hi}, path);
  const auto sg = get_or(j, "global_sigma_range",
                         std::array<double, 2>{m.global_sigma_lo, m.global_sigma_hi}, path);
  m.global_axis_lo = ax[0];
  m.global_axis_hi = ax[1];
  m.global_sigma_lo = sg[0];
  m.global_sigma_hi = sg[1];
  return m;
}

}  // namespace caddm::detail
