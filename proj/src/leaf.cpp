#include "imcflab/leaf.hpp"

#include <algorithm>
#include <cmath>

#include "imcflab/common.hpp"

namespace imcf {

double integrate_leaf_metric(const SphereGrid& sg, const Sym2* g,
                             const std::vector<double>& integrand) {
  require(static_cast<int>(integrand.size()) == sg.size(), "integrand size does not match leaf");
  double s = 0;
  for (int i = 0; i < sg.n_theta; ++i) {
    double row = 0;
    for (int j = 0; j < sg.n_phi; ++j) {
      const int n = i * sg.n_phi + j;
      const double v = integrand[n];
      if (!std::isfinite(v)) throw InputError("non-finite integrand value at leaf node " + std::to_string(n));
      row += v * std::sqrt(g[n].det());
    }
    s += sg.weight[i] / sg.sin_theta[i] * row;
  }
  return s * sg.dphi;
}

double integrate_leaf(const AnnulusField& f, int k, const std::vector<double>& integrand) {
  require(k >= 0 && k < f.time.n_t, "leaf index out of range");
  return integrate_leaf_metric(f.sphere, f.g.data() + f.index(k, 0, 0), integrand);
}

double leaf_area(const AnnulusField& f, int k) {
  return integrate_leaf(f, k, std::vector<double>(f.leaf_size(), 1.0));
}

namespace {

double leaf_H2(const AnnulusField& f, int k) {
  std::vector<double> h2(f.leaf_size());
  const long base = f.index(k, 0, 0);
  for (long n = 0; n < f.leaf_size(); ++n) h2[n] = f.H[base + n] * f.H[base + n];
  return integrate_leaf(f, k, h2);
}

}  // namespace

double hawking_mass(const AnnulusField& f, int k) {
  const double area = leaf_area(f, k);
  const double c = 16 * kPi;
  return std::sqrt(area / (c * c * c)) * (c - leaf_H2(f, k));
}

double average_H2(const AnnulusField& f, int k) { return leaf_H2(f, k) / leaf_area(f, k); }

std::vector<std::vector<double>> fornberg_weights(double x0, const std::vector<double>& x, int m) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1, c4 = x[0] - x0;
  c[0][0] = 1;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1, c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  return c;
}

LeafDiff::LeafDiff(const SphereGrid& sg)
    : n_theta_(sg.n_theta), n_phi_(sg.n_phi), dphi_(sg.dphi), w1_(sg.n_theta), w2_(sg.n_theta) {
  const int n = sg.n_theta;
  auto ext = [&](int e) {
    if (e < 0) return -sg.theta[-1 - e];
    if (e >= n) return 2 * kPi - sg.theta[2 * n - 1 - e];
    return sg.theta[e];
  };
  for (int i = 0; i < n; ++i) {
    std::vector<double> x(5);
    for (int a = 0; a < 5; ++a) x[a] = ext(i - 2 + a);
    auto c = fornberg_weights(sg.theta[i], x, 2);
    for (int a = 0; a < 5; ++a) {
      w1_[i][a] = c[a][1];
      w2_[i][a] = c[a][2];
    }
  }
}

// Brioschi formula rewritten in E, F/sin, G/sin^2 so that only one factor of
// sin^2 is divided out; the plain form loses ~h^4/sin^4 near the poles.
std::vector<double> gauss_curvature(const SphereGrid& sg, const Sym2* g) {
  const LeafDiff D(sg);
  const int nt = sg.n_theta, np = sg.n_phi;
  std::vector<double> Ev(sg.size()), Fv(sg.size()), Gv(sg.size());
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < np; ++j) {
      const int n = i * np + j;
      const double s = sg.sin_theta[i];
      Ev[n] = g[n].xx;
      Fv[n] = g[n].xy / s;
      Gv[n] = g[n].yy / (s * s);
    }
  auto E = [&](int i, int j) { return Ev[i * np + j]; };
  auto Ft = [&](int i, int j) { return Fv[i * np + j]; };
  auto Gt = [&](int i, int j) { return Gv[i * np + j]; };
  std::vector<double> Ftp(sg.size());
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < np; ++j) Ftp[i * np + j] = D.d_phi(Ft, i, j);
  auto Ftp_at = [&](int i, int j) { return Ftp[i * np + j]; };
  std::vector<double> K(sg.size());
  for (int i = 0; i < nt; ++i) {
    const double s = sg.sin_theta[i], c = sg.cos_theta[i];
    for (int j = 0; j < np; ++j) {
      const double e = E(i, j), ft = Ft(i, j), gt = Gt(i, j);
      const double Eu = D.d_theta(E, 1, i, j), Epv = D.d_phi(E, i, j), Evv = D.d_phi2(E, i, j);
      const double Ftu = D.d_theta(Ft, 1, i, j), Ftv = Ftp_at(i, j);
      const double Ftuv = D.d_theta(Ftp_at, 1, i, j);
      const double Gtu = D.d_theta(Gt, 1, i, j), Gtv = D.d_phi(Gt, i, j);
      const double Gtuu = D.d_theta2(Gt, 1, i, j);
      const double num =
          -e * ft * c * Gtv / 2 + e * gt * gt * s * s - e * gt * s * s * Gtuu / 2 +
          e * gt * s * Ftuv - e * gt * s * c * Gtu + e * gt * c * Ftv - e * gt * Evv / 2 +
          e * s * s * Gtu * Gtu / 4 - e * s * Ftu * Gtv / 2 + e * Epv * Gtv / 4 -
          ft * ft * gt * s * s + ft * ft * s * s * Gtuu / 2 - ft * ft * s * Ftuv +
          1.5 * ft * ft * s * c * Gtu + ft * ft * Evv / 2 - ft * gt * s * c * Ftu -
          ft * gt * c * Epv / 2 - ft * s * s * Ftu * Gtu / 2 + ft * s * Eu * Gtv / 4 -
          ft * s * Epv * Gtu / 4 + ft * s * Ftu * Ftv - ft * Epv * Ftv / 2 +
          gt * gt * s * c * Eu / 2 + gt * s * s * Eu * Gtu / 4 - gt * s * Eu * Ftv / 2 +
          gt * Epv * Epv / 4;
      const double w = e * gt - ft * ft;
      K[i * np + j] = num / (s * s * w * w);
    }
  }
  return K;
}

std::vector<double> gauss_curvature(const AnnulusField& f, int k) {
  require(k >= 0 && k < f.time.n_t, "leaf index out of range");
  return gauss_curvature(f.sphere, f.g.data() + f.index(k, 0, 0));
}

double euler_characteristic(const AnnulusField& f, int k) {
  return integrate_leaf(f, k, gauss_curvature(f, k)) / (2 * kPi);
}

double l2_metric_gap(const AnnulusField& a, const AnnulusField& b, double t_lo, double t_hi) {
  require(same_grid(a, b), "l2_metric_gap: grid mismatch");
  require(t_lo <= t_hi, "l2_metric_gap: empty region");
  const auto& sg = a.sphere;
  std::vector<double> series(a.time.n_t);
  std::vector<double> integrand(a.leaf_size());
  for (int k = 0; k < a.time.n_t; ++k) {
    const double t = a.time.t(k);
    const double s = a.r0 * a.r0 * std::exp(t);
    for (int i = 0; i < sg.n_theta; ++i) {
      const Sym2 sinv = round_metric(sg.sin_theta[i]).inverse();
      for (int j = 0; j < sg.n_phi; ++j) {
        const long n = a.index(k, i, j);
        const double dtt = (1 / (a.H[n] * a.H[n]) - 1 / (b.H[n] * b.H[n])) * 4 / s;
        const Sym2 dg = a.g[n] - b.g[n];
        const double leaf = tensor_inner(sinv, dg, dg) / (s * s);
        integrand[i * sg.n_phi + j] = (dtt * dtt + leaf) / a.H[n];
      }
    }
    series[k] = integrate_leaf(a, k, integrand);
  }
  return integrate_time(a.time, series, t_lo, t_hi);
}

double sup_metric_gap(const AnnulusField& a, const AnnulusField& b) {
  require(same_grid(a, b), "sup_metric_gap: grid mismatch");
  const auto& sg = a.sphere;
  double worst = 0;
  for (int k = 0; k < a.time.n_t; ++k) {
    const double s = a.r0 * a.r0 * std::exp(a.time.t(k));
    for (int i = 0; i < sg.n_theta; ++i) {
      const Sym2 sinv = round_metric(sg.sin_theta[i]).inverse();
      for (int j = 0; j < sg.n_phi; ++j) {
        const long n = a.index(k, i, j);
        const double dtt = (1 / (a.H[n] * a.H[n]) - 1 / (b.H[n] * b.H[n])) * 4 / s;
        const Sym2 dg = a.g[n] - b.g[n];
        worst = std::max(worst, std::sqrt(dtt * dtt + tensor_inner(sinv, dg, dg) / (s * s)));
      }
    }
  }
  return worst;
}

}  // namespace imcf
