#include "caddm/iil.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "caddm/rng.hpp"

namespace caddm {

using nlohmann::json;

namespace {

const char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string b64_encode(const std::vector<uint8_t>& in) {
  std::string out;
  out.reserve((in.size() + 2) / 3 * 4);
  for (size_t i = 0; i < in.size(); i += 3) {
    uint32_t v = static_cast<uint32_t>(in[i]) << 16;
    if (i + 1 < in.size()) v |= static_cast<uint32_t>(in[i + 1]) << 8;
    if (i + 2 < in.size()) v |= in[i + 2];
    out.push_back(kB64[(v >> 18) & 63]);
    out.push_back(kB64[(v >> 12) & 63]);
    out.push_back(i + 1 < in.size() ? kB64[(v >> 6) & 63] : '=');
    out.push_back(i + 2 < in.size() ? kB64[v & 63] : '=');
  }
  return out;
}

std::vector<uint8_t> b64_decode(const std::string& in) {
  auto val = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  std::vector<uint8_t> out;
  uint32_t buf = 0;
  int bits = 0;
  for (char c : in) {
    if (c == '=' || c == '\n' || c == '\r') continue;
    const int v = val(c);
    if (v < 0) throw std::runtime_error("base64: bad character");
    buf = (buf << 6) | static_cast<uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<uint8_t>((buf >> bits) & 0xff));
    }
  }
  return out;
}

std::vector<uint8_t> floats_le(const std::vector<double>& v) {
  std::vector<uint8_t> bytes(v.size() * 4);
  for (size_t i = 0; i < v.size(); ++i) {
    const float f = static_cast<float>(v[i]);
    uint32_t u;
    std::memcpy(&u, &f, 4);
    for (int b = 0; b < 4; ++b) bytes[i * 4 + static_cast<size_t>(b)] =
        static_cast<uint8_t>((u >> (8 * b)) & 0xff);
  }
  return bytes;
}

std::vector<double> floats_from_le(const std::vector<uint8_t>& bytes) {
  if (bytes.size() % 4 != 0) throw std::runtime_error("feature blob size not a float multiple");
  std::vector<double> v(bytes.size() / 4);
  for (size_t i = 0; i < v.size(); ++i) {
    uint32_t u = 0;
    for (int b = 0; b < 4; ++b) u |= static_cast<uint32_t>(bytes[i * 4 + static_cast<size_t>(b)]) << (8 * b);
    float f;
    std::memcpy(&f, &u, 4);
    v[i] = static_cast<double>(f);
  }
  return v;
}

// Cyclic Jacobi eigensolver for a symmetric matrix; A is destroyed.
// V ends up with eigenvector j in column j (row-major storage).
void jacobi_eigen(std::vector<double>& A, int n, std::vector<double>& eigvals,
                  std::vector<double>& V) {
  V.assign(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) V[static_cast<size_t>(i) * n + i] = 1.0;
  auto a = [&](int i, int j) -> double& { return A[static_cast<size_t>(i) * n + j]; };
  auto v = [&](int i, int j) -> double& { return V[static_cast<size_t>(i) * n + j]; };

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-24) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  eigvals.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) eigvals[static_cast<size_t>(i)] = a(i, i);
}

struct Rect {
  double x0, y0, x1, y1;
  double area() const { return std::max(0.0, x1 - x0) * std::max(0.0, y1 - y0); }
};

double rect_iou(const Rect& a, const Rect& b) {
  const double ix = std::max(0.0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
  const double iy = std::max(0.0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0)
    return a.x0 == b.x0 && a.y0 == b.y0 && a.x1 == b.x1 && a.y1 == b.y1 ? 1.0 : 0.0;
  return inter / uni;
}

double quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  const double h = p * static_cast<double>(sorted.size() - 1);
  const size_t lo = static_cast<size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

std::vector<FeatureRecord> read_feature_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_feature_records: cannot open " + path);
  std::vector<FeatureRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    FeatureRecord r;
    r.identity = j.at("identity").get<std::string>();
    r.label = j.at("label").get<std::string>() == "fake" ? 1 : 0;
    r.feature = floats_from_le(b64_decode(j.at("feature_b64").get<std::string>()));
    out.push_back(std::move(r));
  }
  return out;
}

void write_feature_records(const std::string& path, const std::vector<FeatureRecord>& recs) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("write_feature_records: cannot open " + path);
  for (const auto& r : recs) {
    json j{{"identity", r.identity},
           {"label", r.label ? "fake" : "genuine"},
           {"feature_b64", b64_encode(floats_le(r.feature))}};
    out << j.dump() << '\n';
  }
}

std::vector<FeatureRecord> sample_per_identity(const std::vector<FeatureRecord>& features,
                                               int k) {
  if (k < 1) throw std::invalid_argument("sample_per_identity: k must be positive");
  std::vector<std::string> order;
  std::map<std::string, std::vector<size_t>> by_id;
  for (size_t i = 0; i < features.size(); ++i) {
    auto [it, inserted] = by_id.try_emplace(features[i].identity);
    if (inserted) order.push_back(features[i].identity);
    it->second.push_back(i);
  }
  std::vector<FeatureRecord> out;
  for (const auto& id : order) {
    const auto& idx = by_id[id];
    const size_t n = idx.size();
    const size_t kk = std::min<size_t>(static_cast<size_t>(k), n);
    for (size_t t = 0; t < kk; ++t) out.push_back(features[idx[t * n / kk]]);
  }
  return out;
}

std::vector<OverlapDistribution> id_overlap(const std::vector<FeatureRecord>& features,
                                            const std::vector<double>& thresholds,
                                            bool genuine_only) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<size_t>> by_id;
  for (size_t i = 0; i < features.size(); ++i) {
    if (genuine_only && features[i].label == 1) continue;
    auto [it, inserted] = by_id.try_emplace(features[i].identity);
    if (inserted) order.push_back(features[i].identity);
    it->second.push_back(i);
  }
  if (order.size() < 2) throw std::invalid_argument("id_overlap: need at least 2 identities");
  std::vector<size_t> used;
  for (const auto& id : order) {
    if (by_id[id].size() < 2)
      throw std::invalid_argument("id_overlap: identity '" + id +
                                  "' has fewer than 2 points (degenerate rectangle)");
    for (size_t i : by_id[id]) used.push_back(i);
  }

  const size_t dim = features[used.front()].feature.size();
  for (size_t i : used)
    if (features[i].feature.size() != dim)
      throw std::invalid_argument("id_overlap: inconsistent feature dimension");

  // PCA: covariance of the mean-centered set, top-2 eigenvectors, sign fixed
  // so each axis' largest-magnitude component is positive.
  std::vector<double> mean(dim, 0.0);
  for (size_t i : used)
    for (size_t d = 0; d < dim; ++d) mean[d] += features[i].feature[d];
  for (double& m : mean) m /= static_cast<double>(used.size());

  std::vector<double> cov(dim * dim, 0.0);
  for (size_t i : used) {
    const auto& f = features[i].feature;
    for (size_t a = 0; a < dim; ++a) {
      const double fa = f[a] - mean[a];
      for (size_t b = a; b < dim; ++b) cov[a * dim + b] += fa * (f[b] - mean[b]);
    }
  }
  for (size_t a = 0; a < dim; ++a)
    for (size_t b = a; b < dim; ++b) {
      cov[a * dim + b] /= static_cast<double>(used.size());
      cov[b * dim + a] = cov[a * dim + b];
    }

  std::vector<double> eigvals, V;
  jacobi_eigen(cov, static_cast<int>(dim), eigvals, V);
  std::vector<size_t> ei(dim);
  std::iota(ei.begin(), ei.end(), size_t{0});
  std::stable_sort(ei.begin(), ei.end(),
                   [&](size_t a, size_t b) { return eigvals[a] > eigvals[b]; });

  std::array<std::vector<double>, 2> axes;
  for (int k = 0; k < 2; ++k) {
    axes[static_cast<size_t>(k)].resize(dim);
    const size_t col = ei[static_cast<size_t>(k)];
    size_t imax = 0;
    for (size_t d = 1; d < dim; ++d)
      if (std::abs(V[d * dim + col]) > std::abs(V[imax * dim + col])) imax = d;
    const double sign = V[imax * dim + col] >= 0 ? 1.0 : -1.0;
    for (size_t d = 0; d < dim; ++d)
      axes[static_cast<size_t>(k)][d] = sign * V[d * dim + col];
  }

  // Per-identity bounding rectangles in the projected plane.
  std::vector<Rect> rects;
  for (const auto& id : order) {
    Rect r{1e300, 1e300, -1e300, -1e300};
    for (size_t i : by_id[id]) {
      double proj[2] = {0, 0};
      for (int k = 0; k < 2; ++k)
        for (size_t d = 0; d < dim; ++d)
          proj[k] += (features[i].feature[d] - mean[d]) * axes[static_cast<size_t>(k)][d];
      r.x0 = std::min(r.x0, proj[0]);
      r.x1 = std::max(r.x1, proj[0]);
      r.y0 = std::min(r.y0, proj[1]);
      r.y1 = std::max(r.y1, proj[1]);
    }
    rects.push_back(r);
  }

  std::vector<OverlapDistribution> out;
  for (double t : thresholds) {
    OverlapDistribution d;
    d.threshold = t;
    for (size_t i = 0; i < rects.size(); ++i) {
      int count = 0;
      for (size_t j = 0; j < rects.size(); ++j)
        if (j != i && rect_iou(rects[i], rects[j]) >= t) ++count;
      d.counts.push_back(count);
    }
    std::vector<double> sorted(d.counts.begin(), d.counts.end());
    std::sort(sorted.begin(), sorted.end());
    d.min = sorted.front();
    d.q1 = quantile(sorted, 0.25);
    d.median = quantile(sorted, 0.5);
    d.q3 = quantile(sorted, 0.75);
    d.max = sorted.back();
    out.push_back(std::move(d));
  }
  return out;
}

ProbeResult id_linear_probe(const std::vector<FeatureRecord>& features,
                            double train_fraction, int epochs, double lr,
                            uint64_t split_seed) {
  if (features.empty()) throw std::invalid_argument("id_linear_probe: no features");
  std::vector<std::string> classes;
  std::map<std::string, size_t> class_of;
  for (const auto& f : features)
    if (class_of.try_emplace(f.identity, classes.size()).second)
      classes.push_back(f.identity);
  if (classes.size() < 2) throw std::invalid_argument("id_linear_probe: need >= 2 identities");

  const size_t K = classes.size();
  const size_t D = features.front().feature.size();

  // L2-normalize.
  std::vector<std::vector<double>> X(features.size());
  std::vector<size_t> Y(features.size());
  for (size_t i = 0; i < features.size(); ++i) {
    if (features[i].feature.size() != D)
      throw std::invalid_argument("id_linear_probe: inconsistent feature dimension");
    X[i] = features[i].feature;
    double norm = 0.0;
    for (double v : X[i]) norm += v * v;
    norm = std::sqrt(norm);
    if (norm > 0)
      for (double& v : X[i]) v /= norm;
    Y[i] = class_of[features[i].identity];
  }

  // Stratified split.
  std::vector<size_t> train_idx, test_idx;
  {
    std::map<size_t, std::vector<size_t>> per_class;
    for (size_t i = 0; i < X.size(); ++i) per_class[Y[i]].push_back(i);
    const Rng root(split_seed);
    for (auto& [cls, idx] : per_class) {
      Rng r = root.derive(0x5f17, cls);
      r.shuffle(idx);
      size_t n_tr = static_cast<size_t>(std::lround(train_fraction * static_cast<double>(idx.size())));
      n_tr = std::clamp<size_t>(n_tr, 1, idx.size() > 1 ? idx.size() - 1 : 1);
      for (size_t k = 0; k < idx.size(); ++k)
        (k < n_tr ? train_idx : test_idx).push_back(idx[k]);
    }
  }

  // Multinomial logistic regression, weights and bias start at zero.
  std::vector<double> W(K * (D + 1), 0.0);
  auto logits_of = [&](size_t i, std::vector<double>& out) {
    out.assign(K, 0.0);
    for (size_t k = 0; k < K; ++k) {
      const double* w = &W[k * (D + 1)];
      double s = w[D];
      for (size_t d = 0; d < D; ++d) s += w[d] * X[i][d];
      out[k] = s;
    }
  };

  ProbeResult res;
  res.n_classes = K;
  res.n_train = train_idx.size();
  res.n_heldout = test_idx.size();

  std::vector<double> logits, probs(K), grad(W.size());
  for (int e = 0; e < epochs; ++e) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (size_t i : train_idx) {
      logits_of(i, logits);
      const double mx = *std::max_element(logits.begin(), logits.end());
      double z = 0.0;
      for (size_t k = 0; k < K; ++k) z += std::exp(logits[k] - mx);
      loss += std::log(z) - (logits[Y[i]] - mx);
      for (size_t k = 0; k < K; ++k) {
        const double p = std::exp(logits[k] - mx) / z - (Y[i] == k ? 1.0 : 0.0);
        double* g = &grad[k * (D + 1)];
        for (size_t d = 0; d < D; ++d) g[d] += p * X[i][d];
        g[D] += p;
      }
    }
    const double inv = 1.0 / static_cast<double>(train_idx.size());
    loss *= inv;
    for (size_t k = 0; k < W.size(); ++k) W[k] -= lr * inv * grad[k];
    res.train_loss.push_back(loss);

    size_t correct = 0;
    for (size_t i : test_idx) {
      logits_of(i, logits);
      size_t arg = 0;
      for (size_t k = 1; k < K; ++k)
        if (logits[k] > logits[arg]) arg = k;
      if (arg == Y[i]) ++correct;
    }
    res.heldout_acc.push_back(test_idx.empty()
                                  ? 0.0
                                  : static_cast<double>(correct) /
                                        static_cast<double>(test_idx.size()));
  }
  return res;
}

}  // namespace caddm
