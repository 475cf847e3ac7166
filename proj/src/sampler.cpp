#include "imcflab/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "imcflab/common.hpp"

namespace imcf {

namespace {

// Lagrange weights and their derivatives for m <= 4 nodes.
void lagrange(const double* x, int m, double x0, double* w, double* dw) {
  for (int a = 0; a < m; ++a) {
    double den = 1, num = 1;
    for (int b = 0; b < m; ++b)
      if (b != a) {
        den *= x[a] - x[b];
        num *= x0 - x[b];
      }
    w[a] = num / den;
    double d = 0;
    for (int c = 0; c < m; ++c) {
      if (c == a) continue;
      double p = 1;
      for (int b = 0; b < m; ++b)
        if (b != a && b != c) p *= x0 - x[b];
      d += p;
    }
    dw[a] = d / den;
  }
}

}  // namespace

FieldSampler::FieldSampler(const AnnulusField& f) : f_(f) {
  const int n = f.sphere.n_theta;
  ext_theta_.resize(n + 4);
  for (int e = -2; e < n + 2; ++e) {
    double th;
    if (e < 0)
      th = -f.sphere.theta[-1 - e];
    else if (e >= n)
      th = 2 * kPi - f.sphere.theta[2 * n - 1 - e];
    else
      th = f.sphere.theta[e];
    ext_theta_[e + 2] = th;
  }
}

PointSample FieldSampler::at(double t, double theta, double phi) const {
  const auto& sg = f_.sphere;
  const auto& tg = f_.time;
  const int nth = sg.n_theta, nph = sg.n_phi;

  // time stencil
  int mt = std::min(4, tg.n_t), k0 = 0;
  double xt[4], wt[4], dwt[4];
  if (tg.n_t > mt || (tg.n_t > 1 && mt == 4)) {
    k0 = std::clamp(static_cast<int>(std::floor(t / tg.dt)) - 1, 0, tg.n_t - mt);
  }
  for (int a = 0; a < mt; ++a) xt[a] = tg.dt * (k0 + a);
  if (mt == 1) {
    wt[0] = 1;
    dwt[0] = 0;
  } else {
    lagrange(xt, mt, t, wt, dwt);
  }

  // theta stencil on the extended node list
  const double thc = std::clamp(theta, ext_theta_.front(), ext_theta_.back());
  int e0 = static_cast<int>(std::upper_bound(ext_theta_.begin(), ext_theta_.end(), thc) -
                            ext_theta_.begin()) - 1 - 2;
  e0 = std::clamp(e0 - 1, -2, nth - 2);
  double xth[4], wth[4], dwth[4];
  for (int a = 0; a < 4; ++a) xth[a] = ext_theta_[e0 + a + 2];
  lagrange(xth, 4, theta, wth, dwth);

  // phi stencil, periodic
  const double ph = phi - 2 * kPi * std::floor(phi / (2 * kPi));
  const int j0 = static_cast<int>(std::floor(ph / sg.dphi)) - 1;
  double xph[4], wph[4], dwph[4];
  for (int a = 0; a < 4; ++a) xph[a] = sg.dphi * (j0 + a);
  lagrange(xph, 4, ph, wph, dwph);

  PointSample s;
  for (int a = 0; a < mt; ++a) {
    const int k = k0 + a;
    for (int b = 0; b < 4; ++b) {
      int e = e0 + b, shift = 0;
      if (e < 0) {
        e = -1 - e;
        shift = nph / 2;
      } else if (e >= nth) {
        e = 2 * nth - 1 - e;
        shift = nph / 2;
      }
      for (int c = 0; c < 4; ++c) {
        const int j = (((j0 + c + shift) % nph) + nph) % nph;
        const long n = f_.index(k, e, j);
        const double w = wt[a] * wth[b] * wph[c];
        const double w_t = dwt[a] * wth[b] * wph[c];
        const double w_th = wt[a] * dwth[b] * wph[c];
        const double w_ph = wt[a] * wth[b] * dwph[c];
        const double H = f_.H[n];
        // pole-regular components: xy/sin, yy/sin^2 (the parity flip cancels)
        const double st = sg.sin_theta[e];
        Sym2 g = f_.g[n], A = f_.A[n];
        g.xy /= st;
        g.yy /= st * st;
        A.xy /= st;
        A.yy /= st * st;
        s.H += w * H;
        s.H_t += w_t * H;
        s.H_th += w_th * H;
        s.H_ph += w_ph * H;
        s.g = s.g + g * w;
        s.g_t = s.g_t + g * w_t;
        s.g_th = s.g_th + g * w_th;
        s.g_ph = s.g_ph + g * w_ph;
        s.A = s.A + A * w;
      }
    }
  }
  const double st = std::sin(theta), ct = std::cos(theta);
  auto restore = [&](Sym2& v) {
    v.xy *= st;
    v.yy *= st * st;
  };
  // d/dtheta of (Ft sin, Gt sin^2) before the values are restored
  s.g_th.xy = s.g_th.xy * st + s.g.xy * ct;
  s.g_th.yy = s.g_th.yy * st * st + 2 * s.g.yy * st * ct;
  restore(s.g);
  restore(s.g_t);
  restore(s.g_ph);
  restore(s.A);
  return s;
}

}  // namespace imcf
