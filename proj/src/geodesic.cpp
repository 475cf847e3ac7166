#include "imcflab/geodesic.hpp"

#include <gsl/gsl_integration.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>

#include "imcflab/common.hpp"
#include "imcflab/graph.hpp"

namespace imcf {

double ghat_speed2(const PointSample& s, const GeodesicState& y) {
  return y.dT * y.dT / (s.H * s.H) + s.g.quad(y.dtheta, y.dphi);
}

GeodesicState geodesic_rhs(const PointSample& s, const GeodesicState& y) {
  const double H = s.H;
  const Sym2 gi = s.g.inverse();
  const double gin[2][2] = {{gi.xx, gi.xy}, {gi.xy, gi.yy}};
  const double An[2][2] = {{s.A.xx, s.A.xy}, {s.A.xy, s.A.yy}};
  const double dH[2] = {s.H_th, s.H_ph};
  const double v[2] = {y.dtheta, y.dphi};
  // dg[l][a][b] = d_l g_ab
  const Sym2* d[2] = {&s.g_th, &s.g_ph};
  double dg[2][2][2];
  for (int l = 0; l < 2; ++l) {
    dg[l][0][0] = d[l]->xx;
    dg[l][0][1] = dg[l][1][0] = d[l]->xy;
    dg[l][1][1] = d[l]->yy;
  }
  GeodesicState r;
  r.T = y.dT;
  r.theta = y.dtheta;
  r.phi = y.dphi;
  r.dT = s.H_t / H * y.dT * y.dT + 2 * (dH[0] * v[0] + dH[1] * v[1]) / H * y.dT +
         H * s.A.quad(v[0], v[1]);
  double acc[2];
  for (int k = 0; k < 2; ++k) {
    double chris = 0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        double G = 0;
        for (int l = 0; l < 2; ++l) G += gin[k][l] * (dg[a][b][l] + dg[b][a][l] - dg[l][a][b]);
        chris += 0.5 * G * v[a] * v[b];
      }
    double mixed = 0;
    for (int p = 0; p < 2; ++p)
      for (int i = 0; i < 2; ++i) mixed += gin[k][p] * An[i][p] * v[i];
    const double radial = (gin[k][0] * dH[0] + gin[k][1] * dH[1]) / (H * H * H);
    acc[k] = -chris - 2 * mixed / H * y.dT - radial * y.dT * y.dT;
  }
  r.dtheta = acc[0];
  r.dphi = acc[1];
  return r;
}

namespace {

GeodesicState axpy(const GeodesicState& y, double h, const GeodesicState& k) {
  return {y.T + h * k.T,           y.theta + h * k.theta, y.phi + h * k.phi,
          y.dT + h * k.dT,         y.dtheta + h * k.dtheta, y.dphi + h * k.dphi};
}

class Stepper {
 public:
  Stepper(const FieldSampler& s, double floor) : s_(s), floor_(floor) {}

  PointSample sample(const GeodesicState& y) const {
    if (std::abs(std::sin(y.theta)) < 1e-5)
      throw InputError("geodesic passes through a coordinate pole (theta = " +
                       std::to_string(y.theta) + ")");
    PointSample ps = s_.at(y.T, y.theta, y.phi);
    if (!(ps.H >= floor_))
      throw InputError("H fell below the floor along the geodesic at t = " + std::to_string(y.T) +
                       ", theta = " + std::to_string(y.theta) + ", phi = " +
                       std::to_string(y.phi));
    return ps;
  }
  GeodesicState rhs(const GeodesicState& y) const { return geodesic_rhs(sample(y), y); }
  GeodesicState rk4(const GeodesicState& y, double h) const {
    const GeodesicState k1 = rhs(y);
    const GeodesicState k2 = rhs(axpy(y, h / 2, k1));
    const GeodesicState k3 = rhs(axpy(y, h / 2, k2));
    const GeodesicState k4 = rhs(axpy(y, h, k3));
    GeodesicState r = y;
    r.T += h / 6 * (k1.T + 2 * k2.T + 2 * k3.T + k4.T);
    r.theta += h / 6 * (k1.theta + 2 * k2.theta + 2 * k3.theta + k4.theta);
    r.phi += h / 6 * (k1.phi + 2 * k2.phi + 2 * k3.phi + k4.phi);
    r.dT += h / 6 * (k1.dT + 2 * k2.dT + 2 * k3.dT + k4.dT);
    r.dtheta += h / 6 * (k1.dtheta + 2 * k2.dtheta + 2 * k3.dtheta + k4.dtheta);
    r.dphi += h / 6 * (k1.dphi + 2 * k2.dphi + 2 * k3.dphi + k4.dphi);
    return r;
  }
  double speed2(const GeodesicState& y) const { return ghat_speed2(sample(y), y); }

 private:
  const FieldSampler& s_;
  double floor_;
};

double field_h_min(const AnnulusField& f) {
  return *std::min_element(f.H.begin(), f.H.end());
}

GeodesicPath integrate_impl(const AnnulusField& f, const FieldSampler& sampler, double floor,
                            GeodesicState y, double length, const GeodesicOptions& opt) {
  const double t_lo = opt.t_lo, t_hi = opt.t_hi < 0 ? f.time.T : opt.t_hi;
  require(length >= 0 && std::isfinite(length), "geodesic length must be finite and >= 0");
  require(opt.step > 0, "geodesic step must be positive");
  require(y.T >= t_lo - 1e-12 && y.T <= t_hi + 1e-12, "geodesic start outside the annulus");
  const Stepper st(sampler, floor);
  const double sp0 = st.speed2(y);
  require(sp0 > 0 && std::isfinite(sp0), "geodesic initial velocity must be nonzero");
  const double sc = 1 / std::sqrt(sp0);
  y.dT *= sc;
  y.dtheta *= sc;
  y.dphi *= sc;

  GeodesicPath path;
  path.s.push_back(0);
  path.states.push_back(y);
  double s = 0, sp_prev = st.speed2(y);
  const double base_step = opt.step * f.r0;
  while (s < length) {
    double h = std::min(base_step, length - s);
    GeodesicState z;
    double sp;
    for (;;) {
      z = st.rk4(y, h);
      const bool outside = z.T < t_lo || z.T > t_hi;
      sp = outside ? sp_prev : st.speed2(z);
      if (std::abs(sp - sp_prev) <= opt.drift_budget || h < base_step / 1024) break;
      h /= 2;
    }
    if (z.T < t_lo || z.T > t_hi) {
      const double bound = z.T < t_lo ? t_lo : t_hi;
      double lo = 0, hi = h;
      for (int it = 0; it < 80 && hi - lo > 1e-15 * std::max(1.0, h); ++it) {
        const double mid = 0.5 * (lo + hi);
        const GeodesicState m = st.rk4(y, mid);
        if (m.T < t_lo || m.T > t_hi) hi = mid; else lo = mid;
      }
      z = st.rk4(y, lo);
      z.T = bound;
      s += lo;
      path.s.push_back(s);
      path.states.push_back(z);
      path.hit_boundary = true;
      path.boundary = bound == t_lo ? 0 : 1;
      path.max_speed_drift = std::max(path.max_speed_drift, std::abs(st.speed2(z) - 1));
      break;
    }
    if ((y.dT < 0 && z.dT > 0) || (y.dT > 0 && z.dT < 0)) {
      double lo = 0, hi = h;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const GeodesicState m = st.rk4(y, mid);
        if ((m.dT < 0) == (y.dT < 0)) lo = mid; else hi = mid;
      }
      const GeodesicState m = st.rk4(y, 0.5 * (lo + hi));
      const PointSample ps = st.sample(m);
      ZeroSpeedEvent ev;
      ev.s = s + 0.5 * (lo + hi);
      ev.T2 = geodesic_rhs(ps, m).dT;
      ev.HA = ps.H * ps.A.quad(m.dtheta, m.dphi);
      path.zero_dT.push_back(ev);
    }
    y = z;
    s += h;
    sp_prev = sp;
    path.s.push_back(s);
    path.states.push_back(y);
    path.max_speed_drift = std::max(path.max_speed_drift, std::abs(sp - 1));
  }
  return path;
}

const gsl_integration_glfixed_table* gl_table() {
  static const gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(48);
  return t;
}

struct Arc {
  double ang = 0, len = 0;
  Arc operator+(const Arc& o) const { return {ang + o.ang, len + o.len}; }
};

}  // namespace

GeodesicPath integrate_geodesic(const AnnulusField& f, GeodesicState init, double length,
                                const GeodesicOptions& opt) {
  const FieldSampler sampler(f);
  return integrate_impl(f, sampler, 1e-8 * field_h_min(f), init, length, opt);
}

double sphere_angle(const AnnulusPoint& a, const AnnulusPoint& b) {
  const double ax = std::sin(a.theta) * std::cos(a.phi), ay = std::sin(a.theta) * std::sin(a.phi),
               az = std::cos(a.theta);
  const double bx = std::sin(b.theta) * std::cos(b.phi), by = std::sin(b.theta) * std::sin(b.phi),
               bz = std::cos(b.theta);
  const double cx = ay * bz - az * by, cy = az * bx - ax * bz, cz = ax * by - ay * bx;
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), ax * bx + ay * by + az * bz);
}

Shooter::Shooter(const AnnulusField& f, ShootOptions opt) : f_(f), opt_(opt) {
  t_lo_ = opt.t_lo;
  t_hi_ = opt.t_hi < 0 ? f.time.T : opt.t_hi;
  require(t_lo_ >= 0 && t_lo_ <= t_hi_ && t_hi_ <= f.time.T + 1e-12,
          "shooting window must satisfy 0 <= t_lo <= t_hi <= T");
  const int nt = f.time.n_t;
  a_.resize(nt);
  F_.resize(nt);
  for (int k = 0; k < nt; ++k) {
    const long n = f.index(k, 0, 0);
    a_[k] = 1 / f.H[n];
    F_[k] = std::sqrt(f.g[n].xx);
  }
  reduced_ = f.rotsym;
  for (int k = 1; k < nt && reduced_; ++k) reduced_ = F_[k] > F_[k - 1];
  if (reduced_) {
    convex_ = true;
  } else {
    for (int k = 0; k < nt && convex_; ++k) {
      const double t = f.time.t(k);
      if (t < t_lo_ - f.time.dt || t > t_hi_ + f.time.dt) continue;
      for (long m = f.index(k, 0, 0); m < f.index(k, 0, 0) + f.leaf_size(); ++m)
        if (!(f.A[m].xx > 0 && f.A[m].det() > 0)) {
          convex_ = false;
          break;
        }
    }
  }
}

Shooter::~Shooter() = default;

double Shooter::a_at(double t) const { return interp_time(f_.time, a_, t); }
double Shooter::F_at(double t) const { return interp_time(f_.time, F_, t); }

double Shooter::graph_distance(const AnnulusPoint& p, const AnnulusPoint& q) const {
  if (!graph_) graph_ = std::make_unique<GridGraph>(f_, opt_.graph_refinement,
                                                    std::vector<double>{t_lo_, t_hi_});
  return graph_->distances(p, {q}, t_lo_, t_hi_).front();
}

ShootResult Shooter::distance(const AnnulusPoint& p, const AnnulusPoint& q) const {
  for (const auto* x : {&p, &q})
    require(std::isfinite(x->t) && std::isfinite(x->theta) && std::isfinite(x->phi) &&
                x->t >= t_lo_ - 1e-12 && x->t <= t_hi_ + 1e-12 && x->theta >= 0 &&
                x->theta <= kPi,
            "distance query point outside the annulus window");
  if (p.t == q.t && sphere_angle(p, q) == 0) return {0, reduced_ ? "clairaut" : "nelder-mead"};
  ShootResult r = reduced_ ? clairaut(p, q) : nelder_mead(p, q);
  r.local_min = !convex_;
  return r;
}

ShootResult Shooter::clairaut(const AnnulusPoint& p, const AnnulusPoint& q) const {
  const double t1 = std::min(p.t, q.t), t2 = std::max(p.t, q.t);
  const double psi = sphere_angle(p, q);
  const double t_lo = t_lo_;
  if (t_hi_ == t_lo_) return {F_at(t_lo) * psi, "clairaut"};
  const auto* gl = gl_table();

  // Arc from t_from (where F >= c) up to t_to, with t = t_from + u^2.
  auto arc = [&](double c, double t_from, double t_to) {
    Arc out;
    const double U = std::sqrt(std::max(t_to - t_from, 0.0));
    if (U == 0) return out;
    for (size_t m = 0; m < gl->n; ++m) {
      double x, w;
      gsl_integration_glfixed_point(0, U, m, &x, &w, gl);
      const double t = t_from + x * x;
      const double a = a_at(t), F = F_at(t);
      const double r = std::sqrt(std::max(F * F - c * c, 1e-300));
      const double jac = 2 * x * w;
      out.ang += jac * c * a / (F * r);
      out.len += jac * a * F / r;
    }
    return out;
  };
  const double F1 = F_at(t1);
  auto eval = [&](double lam) {
    if (lam <= 1) return arc(lam * F1, t1, t2);
    const double ts = t1 - (lam - 1) * (t1 - t_lo);
    const double c = F_at(ts);
    return arc(c, ts, t1) + arc(c, ts, t2);
  };

  double best = std::numeric_limits<double>::infinity();
  const int M = 64;
  // the scan depends only on the two levels; sample grids reuse a few level pairs
  auto& scan = scan_cache_[{t1, t2}];
  if (scan.empty()) {
    if (scan_cache_.size() > 4096) {
      scan_cache_.clear();
      return clairaut(p, q);
    }
    scan.resize(2 * (M + 1));
    for (int m = 0; m <= M; ++m) {
      const Arc a = eval(2.0 * m / M);
      scan[2 * m] = a.ang;
      scan[2 * m + 1] = a.len;
    }
  }
  std::vector<double> lam(M + 1), res(M + 1);
  for (int m = 0; m <= M; ++m) {
    lam[m] = 2.0 * m / M;
    res[m] = scan[2 * m] - psi;
    if (res[m] == 0) best = std::min(best, scan[2 * m + 1]);
  }
  boost::math::tools::eps_tolerance<double> tol(48);
  for (int m = 0; m < M; ++m) {
    if ((res[m] < 0) == (res[m + 1] < 0) || res[m] == 0 || res[m + 1] == 0) continue;
    std::uintmax_t iters = 100;
    const auto br = boost::math::tools::toms748_solve(
        [&](double l) { return eval(l).ang - psi; }, lam[m], lam[m + 1], res[m], res[m + 1], tol,
        iters);
    best = std::min(best, eval(0.5 * (br.first + br.second)).len);
  }
  // Along the lower boundary leaf for the remaining angle.
  if (scan[2 * M] <= psi) best = std::min(best, scan[2 * M + 1] + F_at(t_lo) * (psi - scan[2 * M]));

  ShootResult r;
  r.method = "clairaut";
  if (!std::isfinite(best)) {
    r.fallback = true;
    r.method = "graph";
    r.distance = graph_distance(p, q);
    return r;
  }
  r.distance = best;
  return r;
}

namespace {

struct NMContext {
  const AnnulusField* f;
  const FieldSampler* sampler;
  double floor;
  GeodesicOptions gopt;
  GeodesicState start;  // position only
  PointSample ps;
  AnnulusPoint q;
  PointSample qs;
};

GeodesicState nm_initial(const NMContext& c, double alpha, double beta) {
  const Sym2& g = c.ps.g;
  const double s = std::sqrt(g.xx);
  const double e2n = std::sqrt(g.xx * g.det());
  GeodesicState y = c.start;
  const double ct = std::cos(alpha), sl = std::sin(alpha);
  const double c1 = sl * std::cos(beta), c2 = sl * std::sin(beta);
  y.dT = ct * c.ps.H;
  y.dtheta = c1 / s + c2 * (-g.xy) / e2n;
  y.dphi = c2 * g.xx / e2n;
  return y;
}

double nm_cost(const gsl_vector* x, void* params) {
  const auto& c = *static_cast<const NMContext*>(params);
  const double L = gsl_vector_get(x, 2);
  if (!(L > 0)) return 1e6 + std::abs(L);
  try {
    const GeodesicState y0 = nm_initial(c, gsl_vector_get(x, 0), gsl_vector_get(x, 1));
    GeodesicOptions o = c.gopt;
    o.step = std::min(o.step, L / (50 * c.f->r0));
    const GeodesicPath path = integrate_impl(*c.f, *c.sampler, c.floor, y0, L, o);
    const GeodesicState& e = path.states.back();
    const double dt = e.T - c.q.t, dth = e.theta - c.q.theta, dph = wrap_angle(e.phi - c.q.phi);
    double miss = dt * dt / (c.qs.H * c.qs.H) + c.qs.g.quad(dth, dph);
    const double left = L - path.s.back();
    miss += left * left;
    return miss;
  } catch (const InputError&) {
    return 1e6;
  }
}

}  // namespace

ShootResult Shooter::nelder_mead(const AnnulusPoint& p, const AnnulusPoint& q) const {
  const FieldSampler sampler(f_);
  NMContext c;
  c.f = &f_;
  c.sampler = &sampler;
  c.floor = 1e-8 * field_h_min(f_);
  c.gopt.t_lo = t_lo_;
  c.gopt.t_hi = t_hi_;
  c.start = {p.t, p.theta, p.phi, 0, 0, 0};
  c.ps = sampler.at(p.t, p.theta, p.phi);
  c.q = q;
  c.qs = sampler.at(q.t, q.theta, q.phi);

  const double dgraph = graph_distance(p, q);
  // Straight coordinate line as the first guess.
  const Sym2& g = c.ps.g;
  const double dt = q.t - p.t, dth = q.theta - p.theta, dph = wrap_angle(q.phi - p.phi);
  const double xt = dt / c.ps.H;
  const double w1 = std::sqrt(g.xx) * (dth + g.xy / g.xx * dph);
  const double w2 = std::sqrt(g.det() / g.xx) * dph;
  const double alpha0 = std::atan2(std::hypot(w1, w2), xt), beta0 = std::atan2(w2, w1);

  gsl_multimin_function fn{nm_cost, 3, &c};
  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> mm(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 3),
      gsl_multimin_fminimizer_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(3), gsl_vector_free),
      step(gsl_vector_alloc(3), gsl_vector_free);
  gsl_vector_set(x.get(), 0, alpha0);
  gsl_vector_set(x.get(), 1, beta0);
  gsl_vector_set(x.get(), 2, dgraph);
  gsl_vector_set(step.get(), 0, 0.2);
  gsl_vector_set(step.get(), 1, 0.2);
  gsl_vector_set(step.get(), 2, 0.1 * dgraph);
  gsl_multimin_fminimizer_set(mm.get(), &fn, x.get(), step.get());
  const double scale = std::max(1.0, dgraph);
  for (int it = 0; it < 600; ++it) {
    if (gsl_multimin_fminimizer_iterate(mm.get())) break;
    if (mm->fval < 1e-20 * scale * scale) break;
    if (gsl_multimin_fminimizer_size(mm.get()) < 1e-10) break;
  }
  ShootResult r;
  r.method = "nelder-mead";
  r.miss = std::sqrt(mm->fval);
  if (r.miss < 1e-6 * scale) {
    r.distance = gsl_vector_get(mm->x, 2);
    return r;
  }
  r.method = "graph";
  r.fallback = true;
  r.distance = dgraph;
  return r;
}

ShootResult shoot_distance(const AnnulusField& f, const AnnulusPoint& p, const AnnulusPoint& q,
                           const ShootOptions& opt) {
  return Shooter(f, opt).distance(p, q);
}

}  // namespace imcf
