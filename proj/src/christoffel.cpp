#include "imcflab/christoffel.hpp"

#include "imcflab/common.hpp"

namespace imcf {

ChristoffelEvaluator::ChristoffelEvaluator(const AnnulusField& f) : f_(f), diff_(f.sphere) {}

ChristoffelAt ChristoffelEvaluator::at(int k, int i, int j) const {
  require(k >= 0 && k < f_.time.n_t && i >= 0 && i < f_.sphere.n_theta && j >= 0 &&
              j < f_.sphere.n_phi,
          "christoffel_at: node out of range");
  const long n = f_.index(k, i, j);
  const double H = f_.H[n];
  const Sym2& g = f_.g[n];
  const Sym2& A = f_.A[n];
  const Sym2 gi = g.inverse();
  const double gin[2][2] = {{gi.xx, gi.xy}, {gi.xy, gi.yy}};
  const double An[2][2] = {{A.xx, A.xy}, {A.xy, A.yy}};

  ChristoffelAt c;
  c.flagged = (k == 0 || k == f_.time.n_t - 1);
  const double Ht = time_derivative(f_.time, [&](int kk) { return f_.H[f_.index(kk, i, j)]; }, k);
  const long base = f_.index(k, 0, 0);
  const int np = f_.sphere.n_phi;
  auto Hleaf = [&](int ii, int jj) { return f_.H[base + ii * np + jj]; };
  const double dH[2] = {diff_.d_theta(Hleaf, 1, i, j), diff_.d_phi(Hleaf, i, j)};

  c.G000 = -Ht / H;
  for (int a = 0; a < 2; ++a) c.G0i0[a] = -dH[a] / H;
  c.G0ij = A * (-H);
  for (int kk = 0; kk < 2; ++kk) {
    for (int a = 0; a < 2; ++a) {
      double s = 0;
      for (int p = 0; p < 2; ++p) s += gin[kk][p] * An[a][p];
      c.Gki0[kk][a] = s / H;
    }
    c.Gk00[kk] = (gin[kk][0] * dH[0] + gin[kk][1] * dH[1]) / (H * H * H);
  }

  // Leaf symbols from central differences of g.
  auto comp = [&](int which) {
    return [&, which](int ii, int jj) {
      const Sym2& m = f_.g[base + ii * np + jj];
      return which == 0 ? m.xx : which == 1 ? m.xy : m.yy;
    };
  };
  auto gxx = comp(0), gxy = comp(1), gyy = comp(2);
  // dg[l][a][b] = d_l g_ab
  double dg[2][2][2];
  dg[0][0][0] = diff_.d_theta(gxx, 1, i, j);
  dg[0][0][1] = dg[0][1][0] = diff_.d_theta(gxy, -1, i, j);
  dg[0][1][1] = diff_.d_theta(gyy, 1, i, j);
  dg[1][0][0] = diff_.d_phi(gxx, i, j);
  dg[1][0][1] = dg[1][1][0] = diff_.d_phi(gxy, i, j);
  dg[1][1][1] = diff_.d_phi(gyy, i, j);
  for (int kk = 0; kk < 2; ++kk)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        double s = 0;
        for (int l = 0; l < 2; ++l)
          s += gin[kk][l] * (dg[a][b][l] + dg[b][a][l] - dg[l][a][b]);
        c.Gkij[kk][a][b] = 0.5 * s;
      }
  return c;
}

ChristoffelAt christoffel_at(const AnnulusField& f, int k, int i, int j) {
  return ChristoffelEvaluator(f).at(k, i, j);
}

}  // namespace imcf
