#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "caddm/nn/network.hpp"

namespace caddm {

// Per-channel normalization statistics of the training images.
struct DatasetStats {
  std::array<double, 3> mean{0.5, 0.5, 0.5};
  std::array<double, 3> stdev{0.25, 0.25, 0.25};
};

struct Checkpoint {
  NetworkConfig arch;
  DatasetStats stats;
  uint64_t seed = 0;
  nn::AlignedVec params;  // layout follows Network(arch).param_infos()
};

// Container: "CADDMCK1" magic, little-endian u64 header length, JSON header
// (architecture, dataset statistics, seed, parameter manifest with names,
// shapes and float offsets), then raw little-endian 32-bit floats.
void save_checkpoint(const std::string& path, const Network& net,
                     const DatasetStats& stats, uint64_t seed);
void save_checkpoint_params(const std::string& path, const NetworkConfig& arch,
                            const nn::AlignedVec& params,
                            const DatasetStats& stats, uint64_t seed);

// Throws ShapeMismatchError when the stored parameter manifest disagrees
// with the layout implied by the stored architecture.
Checkpoint load_checkpoint(const std::string& path);

// Convenience: rebuild the network a checkpoint was saved from.
Network network_from_checkpoint(const Checkpoint& ckpt);

// JSON string round trip for the architecture block (shared by the
// checkpoint header and run-config parsing).
std::string network_config_to_json_string(const NetworkConfig& cfg);
NetworkConfig network_config_from_json_string(const std::string& text);

}  // namespace caddm
