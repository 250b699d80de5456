#include "caddm/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "caddm/errors.hpp"
#include "json_util.hpp"

namespace caddm {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'C', 'A', 'D', 'D', 'M', 'C', 'K', '1'};

void write_u64_le(std::ostream& out, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

uint64_t read_u64_le(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

std::string network_config_to_json_string(const NetworkConfig& cfg) {
  return detail::network_config_to_json(cfg).dump();
}

NetworkConfig network_config_from_json_string(const std::string& text) {
  return detail::network_config_from_json(json::parse(text), "network");
}

void save_checkpoint_params(const std::string& path, const NetworkConfig& arch,
                            const nn::AlignedVec& params,
                            const DatasetStats& stats, uint64_t seed) {
  const Network layout(arch);
  if (params.size() != layout.n_params())
    throw ShapeMismatchError("parameter vector has " + std::to_string(params.size()) +
                             " entries, architecture expects " +
                             std::to_string(layout.n_params()));

  json manifest = json::array();
  size_t float_off = 0;
  for (const auto& p : layout.param_infos()) {
    manifest.push_back(
        {{"name", p.name}, {"shape", p.shape}, {"offset", float_off}, {"count", p.count}});
    float_off += p.count;
  }
  json header{{"format", 1},
              {"arch", detail::network_config_to_json(arch)},
              {"dataset_stats", detail::dataset_stats_to_json(stats)},
              {"seed", seed},
              {"params", manifest}};
  const std::string htext = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out.write(kMagic, 8);
  write_u64_le(out, htext.size());
  out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
  std::vector<float> f(params.size());
  for (size_t i = 0; i < params.size(); ++i) f[i] = static_cast<float>(params[i]);
  out.write(reinterpret_cast<const char*>(f.data()),
            static_cast<std::streamsize>(f.size() * sizeof(float)));
  if (!out) throw std::runtime_error("save_checkpoint: write failure for " + path);
}

void save_checkpoint(const std::string& path, const Network& net,
                     const DatasetStats& stats, uint64_t seed) {
  save_checkpoint_params(path, net.config(), net.params(), stats, seed);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("load_checkpoint: not a checkpoint file: " + path);
  const uint64_t hlen = read_u64_le(in);
  std::string htext(hlen, '\0');
  in.read(htext.data(), static_cast<std::streamsize>(hlen));
  if (!in) throw std::runtime_error("load_checkpoint: truncated header in " + path);

  const json header = json::parse(htext);
  Checkpoint ckpt;
  ckpt.arch = detail::network_config_from_json(header.at("arch"), "arch");
  ckpt.stats = detail::dataset_stats_from_json(header.at("dataset_stats"), "dataset_stats");
  ckpt.seed = header.at("seed").get<uint64_t>();

  const Network layout(ckpt.arch);
  const auto& infos = layout.param_infos();
  const json& manifest = header.at("params");

  // The stored manifest must agree with the layout the architecture implies.
  std::ostringstream diff;
  bool mismatch = manifest.size() != infos.size();
  if (mismatch)
    diff << "parameter count: stored " << manifest.size() << ", expected " << infos.size()
         << "\n";
  for (size_t i = 0; i < std::min<size_t>(manifest.size(), infos.size()); ++i) {
    const std::string name = manifest[i].at("name").get<std::string>();
    const auto shape = manifest[i].at("shape").get<std::vector<int>>();
    if (name != infos[i].name || shape != infos[i].shape) {
      mismatch = true;
      auto fmt = [](const std::vector<int>& s) {
        std::string t = "[";
        for (size_t k = 0; k < s.size(); ++k) t += (k ? "," : "") + std::to_string(s[k]);
        return t + "]";
      };
      diff << infos[i].name << ": expected " << fmt(infos[i].shape) << ", stored " << name
           << " " << fmt(shape) << "\n";
    }
  }
  if (mismatch) throw ShapeMismatchError(diff.str());

  std::vector<float> f(layout.n_params());
  in.read(reinterpret_cast<char*>(f.data()),
          static_cast<std::streamsize>(f.size() * sizeof(float)));
  if (!in) throw std::runtime_error("load_checkpoint: truncated payload in " + path);
  ckpt.params.resize(f.size());
  for (size_t i = 0; i < f.size(); ++i) ckpt.params[i] = static_cast<double>(f[i]);
  return ckpt;
}

Network network_from_checkpoint(const Checkpoint& ckpt) {
  Network net(ckpt.arch);
  net.params() = ckpt.params;
  return net;
}

}  // namespace caddm
