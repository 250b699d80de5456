#include "caddm/dssim.hpp"

#include <algorithm>
#include <stdexcept>

namespace caddm {

DssimMap dssim_map(const Image& a, const Image& b) {
  require_same_shape(a, b, "dssim_map");
  if (a.height < 8 || a.width < 8)
    throw std::invalid_argument("dssim_map: images must be at least 8x8");

  const Plane la = luminance(a);
  const Plane lb = luminance(b);

  Plane laa(a.height, a.width), lbb(a.height, a.width), lab(a.height, a.width);
  for (size_t i = 0; i < la.size(); ++i) {
    laa.values[i] = la.values[i] * la.values[i];
    lbb.values[i] = lb.values[i] * lb.values[i];
    lab.values[i] = la.values[i] * lb.values[i];
  }

  const Plane mu_a = gaussian_blur(la, kSsimSigma, kSsimRadius);
  const Plane mu_b = gaussian_blur(lb, kSsimSigma, kSsimRadius);
  const Plane m_aa = gaussian_blur(laa, kSsimSigma, kSsimRadius);
  const Plane m_bb = gaussian_blur(lbb, kSsimSigma, kSsimRadius);
  const Plane m_ab = gaussian_blur(lab, kSsimSigma, kSsimRadius);

  DssimMap out(a.height, a.width);
  for (size_t i = 0; i < out.size(); ++i) {
    const double ma = mu_a.values[i], mb = mu_b.values[i];
    const double va = m_aa.values[i] - ma * ma;
    const double vb = m_bb.values[i] - mb * mb;
    const double cov = m_ab.values[i] - ma * mb;
    // Difference form: the denominators reduce to the numerators exactly
    // when a == b, so identical inputs give SSIM = 1 bit-exactly and the
    // map is symmetric in its arguments.
    const double dm = ma - mb;
    const double n1 = 2.0 * ma * mb + kSsimC1;
    const double d1 = n1 + dm * dm;
    const double n2 = 2.0 * cov + kSsimC2;
    const double d2 = n2 + ((va - cov) + (vb - cov));
    const double ssim = (n1 * n2) / (d1 * d2);
    out.values[i] = std::clamp((1.0 - ssim) / 2.0, 0.0, 1.0);
  }
  return out;
}

}  // namespace caddm
