#include <algorithm>
#include <cmath>
#include <limits>

#include "imcflab/common.hpp"
#include "imcflab/estimators.hpp"
#include "imcflab/grid.hpp"
#include "imcflab/leaf.hpp"

namespace imcf {

namespace {

double leaf_H(const AnnulusField& f, int k) { return f.H[f.index(k, 0, 0)]; }

void require_same_leaves(const AnnulusField& f1, const AnnulusField& f2) {
  require(f1.rotsym && f2.rotsym, "graph inner bound needs rotationally symmetric fields");
  require(same_grid(f1, f2) && f1.time.T == f2.time.T, "graph inner bound: grid mismatch");
  double worst = 0;
  for (long m = 0; m < f1.node_count(); ++m) {
    const Sym2 d = f1.g[m] - f2.g[m];
    const double scale = std::abs(f1.g[m].xx) + std::abs(f1.g[m].yy);
    worst = std::max(worst, (std::abs(d.xx) + std::abs(d.xy) + std::abs(d.yy)) / scale);
  }
  require(worst <= 1e-8, "graph inner bound: leaf metrics differ");
}

// Z(t) = int_a^t sqrt(1/H^2 - 1/Hb^2) at the given times.
std::vector<double> heights(const AnnulusField& f, const std::vector<double>& slope, double a,
                            const std::vector<double>& ts) {
  std::vector<double> z;
  z.reserve(ts.size());
  for (double t : ts) z.push_back(t > a ? integrate_time(f.time, slope, a, t) : 0.0);
  return z;
}

EmbeddingReport graph_embedding(const DistanceSample& win, const DistanceSample& base,
                                const std::vector<double>& z) {
  EmbeddingReport r;
  double c = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < win.n(); ++i)
    for (int j = i + 1; j < win.n(); ++j) {
      const double dz = z[i] - z[j];
      const double d = win.at(i, j) - std::sqrt(base.at(i, j) * base.at(i, j) + dz * dz);
      if (d > c) {
        c = d;
        r.argmax_pair = {win.points[i], win.points[j]};
      }
    }
  r.C_M = std::max(c, 0.0);
  r.diam = win.max();
  r.S_M = separation_height(r.C_M, r.diam);
  return r;
}

}  // namespace

GraphInnerBound swif_graph_inner_bound(const AnnulusField& f1, const AnnulusField& f2, double a,
                                       double b, const DistanceSample& win1,
                                       const DistanceSample& win2) {
  require_same_leaves(f1, f2);
  require(0 <= a && a < b && b <= f1.time.T, "graph inner bound: bad window");
  require(win1.n() == win2.n(), "graph inner bound: sample size mismatch");
  for (int i = 0; i < win1.n(); ++i) {
    const auto &p = win1.points[i], &q = win2.points[i];
    require(p.t == q.t && p.theta == q.theta && p.phi == q.phi,
            "graph inner bound: point sets differ");
    require(p.t >= a && p.t <= b, "graph inner bound: point outside the window");
  }

  const int nt = f1.time.n_t;
  AnnulusField base = f1;
  base.label = "graph-base";
  std::vector<double> s1(nt), s2(nt), inv_hb(nt);
  for (int k = 0; k < nt; ++k) {
    const double h1 = leaf_H(f1, k), h2 = leaf_H(f2, k), hb = std::max(h1, h2);
    s1[k] = std::sqrt(std::max(0.0, 1 / (h1 * h1) - 1 / (hb * hb)));
    s2[k] = std::sqrt(std::max(0.0, 1 / (h2 * h2) - 1 / (hb * hb)));
    inv_hb[k] = 1 / hb;
    for (long m = f1.index(k, 0, 0); m < f1.index(k, 0, 0) + f1.leaf_size(); ++m) {
      base.A[m] = f1.A[m] * (hb / f1.H[m]);
      base.H[m] = hb;
    }
  }
  const DistanceSample dbase = shooting_sample(base, win1.points, ShootOptions{a, b});

  std::vector<double> ts;
  for (const auto& p : win1.points) ts.push_back(p.t);
  GraphInnerBound r;
  r.e1 = graph_embedding(win1, dbase, heights(f1, s1, a, ts));
  r.e2 = graph_embedding(win2, dbase, heights(f2, s2, a, ts));
  r.V1 = annulus_volume(f1, a, b);
  r.V2 = annulus_volume(f2, a, b);
  r.A1 = leaf_area_at(f1, a) + leaf_area_at(f1, b);
  r.A2 = leaf_area_at(f2, a) + leaf_area_at(f2, b);

  // |Z1 - Z2| area / Hb integrated over the window
  std::vector<double> gap(nt), integrand(nt);
  for (int k = 0; k < nt; ++k) gap[k] = s1[k] - s2[k];
  for (int k = 0; k < nt; ++k) {
    const double t = f1.time.t(k);
    const double dz = t > a ? std::abs(integrate_time(f1.time, gap, a, std::min(t, b))) : 0.0;
    integrand[k] = dz * leaf_area(f1, k) * inv_hb[k];
  }
  r.filling = integrate_time(f1.time, integrand, a, b);
  r.wall = leaf_area_at(f1, b) * std::abs(integrate_time(f1.time, gap, a, b));
  r.bound = swif_pair_bound({r.e1.S_M, r.V1, r.A1, r.e2.S_M, r.V2, r.A2, r.filling, r.wall});
  return r;
}

ExcisionReport excision_bound_for(const AnnulusField& member, const AnnulusField& base,
                                  double t1, double t2, int n_dirs, int n_levels) {
  const double T = base.time.T;
  require(0 <= t1 && t1 < t2 && t2 <= T, "excision window must satisfy 0 <= t1 < t2 <= T");
  require(n_dirs >= 2 && n_levels >= 2, "excision sample too small");
  std::vector<double> levels;
  for (int l = 0; l < n_levels; ++l) levels.push_back(t1 + (t2 - t1) * l / (n_levels - 1));
  const auto pts = fibonacci_points(n_dirs, levels);

  ExcisionReport r;
  r.t1 = t1;
  r.t2 = t2;
  const ShootOptions win{t1, t2};
  const DistanceSample base_win = shooting_sample(base, pts, win);
  const DistanceSample mem_win = shooting_sample(member, pts, win);
  r.base = embedding_constant(base_win, shooting_sample(base, pts));
  r.member = embedding_constant(mem_win, shooting_sample(member, pts));
  r.inner = swif_graph_inner_bound(member, base, t1, t2, mem_win, base_win);

  auto collar = [&](const AnnulusField& f) {
    return annulus_volume(f, 0, t1) + annulus_volume(f, t2, T);
  };
  SwifExcisionInputs in;
  in.S0 = r.base.S_M;
  in.VA0 = annulus_volume(base, t1, t2) + leaf_area_at(base, t1) + leaf_area_at(base, t2);
  in.collar0 = collar(base);
  in.inner = r.inner.bound.total;
  in.Si = r.member.S_M;
  in.VAi = annulus_volume(member, t1, t2) + leaf_area_at(member, t1) + leaf_area_at(member, t2);
  in.collar_i = collar(member);
  r.bound = swif_excision_bound(in);
  return r;
}

}  // namespace imcf
