#include "imcflab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "imcflab/common.hpp"

namespace imcf {

namespace {

constexpr int kStencil[18][3] = {
    {0, -1, -1}, {0, -1, 0}, {0, -1, 1}, {0, 0, -1}, {0, 0, 1}, {0, 1, -1},
    {0, 1, 0},   {0, 1, 1},  {-1, 0, 0}, {-1, -1, 0}, {-1, 1, 0}, {-1, 0, -1},
    {-1, 0, 1},  {1, 0, 0},  {1, -1, 0}, {1, 1, 0},   {1, 0, -1}, {1, 0, 1}};

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

GridGraph::GridGraph(const AnnulusField& f, int refinement, std::vector<double> t_breaks)
    : sampler_(f) {
  require(refinement >= 1 && refinement <= 64, "graph refinement must lie in [1, 64]");
  nth_ = 16 * refinement;
  nph_ = 2 * nth_;
  dth_ = kPi / nth_;

  const double T = f.time.T;
  t_breaks.push_back(0);
  t_breaks.push_back(T);
  for (double b : t_breaks) require(b >= 0 && b <= T, "graph breakpoint outside [0, T]");
  std::sort(t_breaks.begin(), t_breaks.end());
  t_breaks.erase(std::unique(t_breaks.begin(), t_breaks.end()), t_breaks.end());

  double fh = kInf;
  for (long n = 0; n < f.node_count(); ++n) fh = std::min(fh, f.H[n] * std::sqrt(f.g[n].xx));
  const double dt_target = dth_ * fh;
  t_nodes_.push_back(0);
  for (size_t b = 1; b < t_breaks.size(); ++b) {
    const double a = t_breaks[b - 1], c = t_breaks[b];
    const int cells = std::max(1, static_cast<int>(std::ceil((c - a) / dt_target - 1e-9)));
    for (int m = 1; m <= cells; ++m) t_nodes_.push_back(m == cells ? c : a + (c - a) * m / cells);
  }

  const long N = node_count();
  const int nt = n_t();
  nbr_.assign(N * 18, -1);
  wt_.assign(N * 18, kInf);
  for (int k = 0; k < nt; ++k)
    for (int i = 0; i < nth_; ++i)
      for (int j = 0; j < nph_; ++j) {
        const long n = (static_cast<long>(k) * nth_ + i) * nph_ + j;
        const double th = (i + 0.5) * dth_, ph = j * dth_;
        for (int e = 0; e < 18; ++e) {
          const int kk = k + kStencil[e][0];
          if (kk < 0 || kk >= nt) continue;
          int ii = i + kStencil[e][1], jj = j + kStencil[e][2];
          const double thv = th + kStencil[e][1] * dth_, phv = ph + kStencil[e][2] * dth_;
          if (ii < 0) {
            ii = -1 - ii;
            jj += nph_ / 2;
          } else if (ii >= nth_) {
            ii = 2 * nth_ - 1 - ii;
            jj += nph_ / 2;
          }
          jj = ((jj % nph_) + nph_) % nph_;
          nbr_[n * 18 + e] = (static_cast<long>(kk) * nth_ + ii) * nph_ + jj;
          wt_[n * 18 + e] = segment(t_nodes_[k], th, ph, t_nodes_[kk], thv, phv);
        }
      }
}

double GridGraph::segment(double t0, double th0, double ph0, double t1, double th1,
                          double ph1) const {
  const double dt = t1 - t0, dth = th1 - th0, dph = ph1 - ph0;
  const PointSample s = sampler_.at(0.5 * (t0 + t1), 0.5 * (th0 + th1), 0.5 * (ph0 + ph1));
  const double q = dt * dt / (s.H * s.H) + s.g.quad(dth, dph);
  return std::sqrt(std::max(q, 0.0));
}

double GridGraph::h() const {
  double h = dth_;
  for (size_t k = 1; k < t_nodes_.size(); ++k) h = std::max(h, t_nodes_[k] - t_nodes_[k - 1]);
  return h;
}

std::vector<GridGraph::Attach> GridGraph::attach(const AnnulusPoint& p, double t_lo,
                                                 double t_hi) const {
  require(p.t >= t_lo - 1e-12 && p.t <= t_hi + 1e-12, "graph point outside the window");
  int k0 = static_cast<int>(std::upper_bound(t_nodes_.begin(), t_nodes_.end(), p.t) -
                            t_nodes_.begin()) - 1;
  k0 = std::clamp(k0, 0, std::max(n_t() - 2, 0));
  const double u = p.theta / dth_ - 0.5;
  const int i0 = static_cast<int>(std::floor(u));
  const int j0 = static_cast<int>(std::floor(p.phi / dth_));
  std::vector<Attach> out;
  for (int a = 0; a < std::min(2, n_t()); ++a) {
    const int k = k0 + a;
    const double tk = t_nodes_[k];
    if (tk < t_lo - 1e-12 || tk > t_hi + 1e-12) continue;
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        int i = i0 + b, j = j0 + c;
        const double thv = (i + 0.5) * dth_, phv = j * dth_;
        if (i < 0) {
          i = -1 - i;
          j += nph_ / 2;
        } else if (i >= nth_) {
          i = 2 * nth_ - 1 - i;
          j += nph_ / 2;
        }
        j = ((j % nph_) + nph_) % nph_;
        const long n = (static_cast<long>(k) * nth_ + i) * nph_ + j;
        out.push_back({n, segment(p.t, p.theta, p.phi, tk, thv, phv)});
      }
  }
  return out;
}

std::vector<double> GridGraph::distances(const AnnulusPoint& p,
                                         const std::vector<AnnulusPoint>& targets, double t_lo,
                                         double t_hi) const {
  require(t_lo <= t_hi, "empty graph window");
  const auto src = attach(p, t_lo, t_hi);
  const long N = node_count();
  std::vector<double> dist(N, kInf);
  using Item = std::pair<double, long>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (const auto& a : src)
    if (a.w < dist[a.node]) {
      dist[a.node] = a.w;
      pq.push({a.w, a.node});
    }
  const long leaf = static_cast<long>(nth_) * nph_;
  auto allowed = [&](long n) {
    const double t = t_nodes_[n / leaf];
    return t >= t_lo - 1e-12 && t <= t_hi + 1e-12;
  };
  while (!pq.empty()) {
    const auto [d, n] = pq.top();
    pq.pop();
    if (d > dist[n]) continue;
    for (int e = 0; e < 18; ++e) {
      const long m = nbr_[n * 18 + e];
      if (m < 0 || !allowed(m)) continue;
      const double nd = d + wt_[n * 18 + e];
      if (nd < dist[m]) {
        dist[m] = nd;
        pq.push({nd, m});
      }
    }
  }
  std::vector<double> out;
  out.reserve(targets.size());
  for (const auto& q : targets) {
    if (q.t == p.t && q.theta == p.theta && q.phi == p.phi) {
      out.push_back(0);
      continue;
    }
    const auto tq = attach(q, t_lo, t_hi);
    double best = kInf;
    bool share = false;
    for (const auto& a : tq) {
      best = std::min(best, dist[a.node] + a.w);
      for (const auto& b : src) share = share || (a.node == b.node);
    }
    if (share) {
      const double dph = wrap_angle(q.phi - p.phi);
      best = std::min(best, segment(p.t, p.theta, p.phi, q.t, q.theta, p.phi + dph));
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace imcf
