#include "imcflab/estimators.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "imcflab/common.hpp"
#include "imcflab/graph.hpp"
#include "imcflab/leaf.hpp"
#include "imcflab/sampler.hpp"

namespace imcf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_nonneg(double v, const char* name) {
  require(std::isfinite(v) && v >= 0, std::string("bound input must be finite and >= 0: ") + name);
}

double integrate_envelope(const Envelope& h, double a, double b) {
  if (b <= a) return 0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(h, a, b, 10, 1e-13);
}

// Segment midpoint and increments with the phi jump wrapped.
struct Segment {
  double t, th, ph, dt, dth, dph;
};

Segment segment(const AnnulusPoint& a, const AnnulusPoint& b) {
  const double dph = wrap_angle(b.phi - a.phi);
  return {0.5 * (a.t + b.t), 0.5 * (a.theta + b.theta), a.phi + 0.5 * dph,
          b.t - a.t,         b.theta - a.theta,         dph};
}

std::vector<Segment> segments(const Curve& c) {
  std::vector<Segment> out;
  const auto& s = c.samples;
  for (size_t k = 1; k < s.size(); ++k) out.push_back(segment(s[k - 1], s[k]));
  if (c.closed && s.size() > 1) out.push_back(segment(s.back(), s.front()));
  return out;
}

void require_inside(const AnnulusField& f, const Curve& c) {
  for (const auto& p : c.samples)
    require(std::isfinite(p.t) && std::isfinite(p.theta) && std::isfinite(p.phi) &&
                p.t >= -1e-12 && p.t <= f.time.T + 1e-12 && p.theta >= 0 && p.theta <= kPi,
            "curve sample outside the annulus");
}

double clamp_t(const AnnulusField& f, double t) { return std::clamp(t, 0.0, f.time.T); }

double norm3(const std::array<double, 3>& x) {
  return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
}

}  // namespace

Curve make_curve(std::vector<AnnulusPoint> samples, bool closed) {
  require(samples.size() >= 2, "a curve needs at least two samples");
  Curve c;
  bool inc = true, dec = true;
  for (size_t k = 1; k < samples.size(); ++k) {
    const auto& a = samples[k - 1];
    const auto& b = samples[k];
    require(!(a.t == b.t && a.theta == b.theta && wrap_angle(a.phi - b.phi) == 0),
            "consecutive curve samples coincide");
    inc = inc && b.t >= a.t;
    dec = dec && b.t <= a.t;
  }
  c.samples = std::move(samples);
  c.monotone_t = !closed && (inc || dec);
  c.closed = closed;
  return c;
}

double curve_length(const AnnulusField& f, const Curve& c, CurveMetric m) {
  require_inside(f, c);
  const FieldSampler fs(f);
  const double r0 = f.r0;
  double L = 0;
  for (const Segment& s : segments(c)) {
    const double t = clamp_t(f, s.t);
    const double a = 0.25 * r0 * r0 * std::exp(t);
    double q;
    if (m == CurveMetric::delta) {
      const double st = std::sin(s.th);
      q = a * s.dt * s.dt + 4 * a * (s.dth * s.dth + st * st * s.dph * s.dph);
    } else {
      const PointSample p = fs.at(t, s.th, s.ph);
      const double tt = m == CurveMetric::ghat ? 1 / (p.H * p.H) : a;
      q = tt * s.dt * s.dt + p.g.quad(s.dth, s.dph);
    }
    L += std::sqrt(std::max(q, 0.0));
  }
  return L;
}

LengthGapDt length_gap_dt(const AnnulusField& f, const Curve& c) {
  require(c.monotone_t, "length gap needs a curve monotone in t");
  require_inside(f, c);
  const FieldSampler fs(f);
  const double r0 = f.r0;
  double Lhat = 0, Lbar = 0, int_c = 0, int_p = 0;
  for (const Segment& s : segments(c)) {
    const double t = clamp_t(f, s.t);
    const PointSample p = fs.at(t, s.th, s.ph);
    const double inv = 1 / (p.H * p.H), a = 0.25 * r0 * r0 * std::exp(t);
    const double leaf = p.g.quad(s.dth, s.dph);
    Lhat += std::sqrt(std::max(inv * s.dt * s.dt + leaf, 0.0));
    Lbar += std::sqrt(std::max(a * s.dt * s.dt + leaf, 0.0));
    const double dt = std::abs(s.dt);
    int_c += std::pow(inv - a, 2) * dt;
    int_p += std::pow(inv - 0.25 * r0 * r0, 2) * dt;
  }
  LengthGapDt out;
  out.lhs = std::abs(Lhat - Lbar);
  const double rt = std::sqrt(f.time.T);
  out.rhs_corrected = rt * std::pow(int_c, 0.25);
  out.rhs_fixed_ref = rt * std::pow(int_p, 0.25);
  return out;
}

LengthGapLeaf length_gap_leaf(const AnnulusField& f, const Curve& c) {
  require(c.monotone_t, "length gap needs a curve monotone in t");
  require_inside(f, c);
  const FieldSampler fs(f);
  const double r0 = f.r0, T = f.time.T;
  double Lbar = 0, Ldel = 0, holder = 0, int_g = 0;
  for (const Segment& s : segments(c)) {
    require(s.dt != 0, "leaf length gap needs a strictly monotone curve");
    const double t = clamp_t(f, s.t);
    const PointSample p = fs.at(t, s.th, s.ph);
    const double a = 0.25 * r0 * r0 * std::exp(t);
    const Sym2 sig = round_metric(std::sin(s.th));
    const Sym2 G = p.g - sig * (r0 * r0 * std::exp(t));
    Lbar += std::sqrt(std::max(a * s.dt * s.dt + p.g.quad(s.dth, s.dph), 0.0));
    Ldel += std::sqrt(std::max(a * s.dt * s.dt + 4 * a * sig.quad(s.dth, s.dph), 0.0));
    const double dt = std::abs(s.dt);
    holder += std::pow(std::sqrt(sig.quad(s.dth, s.dph)) / dt, 4.0 / 3.0) * dt;
    int_g += tensor_inner(sig.inverse(), G, G) * dt;
  }
  LengthGapLeaf out;
  out.lhs = std::abs(Lbar - Ldel);
  out.diam = kPi * r0 * std::exp(T / 2);
  const double d2 = out.diam * out.diam;
  out.C = T > 0 ? std::pow(holder, 0.75) / (std::sqrt(T) * d2) : 0;
  out.rhs = std::sqrt(T) * out.C * d2 * std::pow(int_g, 0.25);
  return out;
}

std::array<double, 3> delta_chart(double r0, const AnnulusPoint& p) {
  const double r = r0 * std::exp(p.t / 2);
  return {r * std::sin(p.theta) * std::cos(p.phi), r * std::sin(p.theta) * std::sin(p.phi),
          r * std::cos(p.theta)};
}

AnnulusPoint from_delta_chart(double r0, const std::array<double, 3>& x) {
  const double r = norm3(x);
  require(r > 0, "origin has no annulus coordinates");
  double ph = std::atan2(x[1], x[0]);
  if (ph < 0) ph += 2 * kPi;
  return {2 * std::log(r / r0), std::acos(std::clamp(x[2] / r, -1.0, 1.0)), ph};
}

Curve delta_line(double r0, const AnnulusPoint& a, const AnnulusPoint& b, int n) {
  require(n >= 1, "line needs at least one segment");
  const auto xa = delta_chart(r0, a), xb = delta_chart(r0, b);
  std::vector<AnnulusPoint> s;
  for (int k = 0; k <= n; ++k) {
    const double u = static_cast<double>(k) / n;
    s.push_back(from_delta_chart(
        r0, {xa[0] + u * (xb[0] - xa[0]), xa[1] + u * (xb[1] - xa[1]), xa[2] + u * (xb[2] - xa[2])}));
  }
  return make_curve(std::move(s));
}

double line_objective(const AnnulusField& f, const Curve& c) {
  require_inside(f, c);
  const FieldSampler fs(f);
  const double r0 = f.r0;
  double obj = 0;
  for (size_t k = 1; k < c.samples.size(); ++k) {
    const auto xa = delta_chart(r0, c.samples[k - 1]), xb = delta_chart(r0, c.samples[k]);
    const std::array<double, 3> mid{0.5 * (xa[0] + xb[0]), 0.5 * (xa[1] + xb[1]),
                                    0.5 * (xa[2] + xb[2])};
    const std::array<double, 3> d{xb[0] - xa[0], xb[1] - xa[1], xb[2] - xa[2]};
    const AnnulusPoint m = from_delta_chart(r0, mid);
    const double t = clamp_t(f, m.t);
    const PointSample p = fs.at(t, m.theta, m.phi);
    const double D = 1 / (p.H * p.H) - 0.25 * r0 * r0 * std::exp(t);
    obj += D * D * norm3(d);
  }
  return obj;
}

ParallelChoice select_parallel_curve(const AnnulusField& f, const Curve& line, double eps,
                                     int n_radii, int n_dirs) {
  require(eps >= 0 && std::isfinite(eps), "eps must be finite and >= 0");
  require(n_radii >= 1 && n_dirs >= 1, "need at least one radius and one direction");
  require(line.samples.size() >= 2 && !line.closed, "need an open line");
  require_inside(f, line);
  const double r0 = f.r0, rmax = r0 * std::exp(f.time.T / 2);
  const int n = static_cast<int>(line.samples.size()) - 1;
  const auto xa = delta_chart(r0, line.samples.front()), xb = delta_chart(r0, line.samples.back());

  auto inside = [&](const std::array<double, 3>& x) {
    const double r = norm3(x);
    return r >= r0 * (1 - 1e-12) && r <= rmax * (1 + 1e-12);
  };
  auto shifted = [](const std::array<double, 3>& x, const std::array<double, 3>& t) {
    return std::array<double, 3>{x[0] + t[0], x[1] + t[1], x[2] + t[2]};
  };
  // straight chart segment, sampled, all samples inside
  auto segment_inside = [&](const std::array<double, 3>& p, const std::array<double, 3>& q, int m) {
    for (int k = 0; k <= m; ++k) {
      const double u = static_cast<double>(k) / m;
      if (!inside({p[0] + u * (q[0] - p[0]), p[1] + u * (q[1] - p[1]), p[2] + u * (q[2] - p[2])}))
        return false;
    }
    return true;
  };

  std::vector<std::array<double, 3>> taus{{0, 0, 0}};
  for (const auto& d : fibonacci_points(n_dirs, {0.0})) {
    const double s = std::sin(d.theta);
    for (int r = 1; r <= n_radii; ++r) {
      const double rad = eps * r / n_radii;
      if (rad > 0)
        taus.push_back({rad * s * std::cos(d.phi), rad * s * std::sin(d.phi), rad * std::cos(d.theta)});
    }
  }

  ParallelChoice best;
  best.objective_original = line_objective(f, line);
  double best_obj = kInf;
  // interpolation noise on a flat field sits far below this
  const double floor = 1e-12 * std::pow(0.25 * r0 * r0, 2) * norm3({xb[0] - xa[0], xb[1] - xa[1], xb[2] - xa[2]});
  for (const auto& tau : taus) {
    const auto pa = shifted(xa, tau), pb = shifted(xb, tau);
    if (!segment_inside(pa, pb, 4 * n) || !segment_inside(xa, pa, 8) || !segment_inside(pb, xb, 8))
      continue;
    ++best.candidates;
    const Curve tr = delta_line(r0, from_delta_chart(r0, pa), from_delta_chart(r0, pb), n);
    const double obj = line_objective(f, tr);
    if (obj < best_obj * (1 - 1e-9) - floor) {
      best_obj = obj;
      best.tau = tau;
    }
  }
  require(best.candidates > 0, "no translate of the line stays inside the annulus");
  best.objective = best_obj;

  const auto pa = shifted(xa, best.tau), pb = shifted(xb, best.tau);
  const double tn = norm3(best.tau);
  const int mc = 4;
  std::vector<std::array<double, 3>> xs;
  auto lerp = [](const std::array<double, 3>& p, const std::array<double, 3>& q, double u) {
    return std::array<double, 3>{p[0] + u * (q[0] - p[0]), p[1] + u * (q[1] - p[1]),
                                 p[2] + u * (q[2] - p[2])};
  };
  xs.push_back(xa);
  if (tn > 0)
    for (int k = 1; k <= mc; ++k) xs.push_back(lerp(xa, pa, static_cast<double>(k) / mc));
  for (int k = 1; k <= n; ++k) xs.push_back(lerp(pa, pb, static_cast<double>(k) / n));
  if (tn > 0)
    for (int k = 1; k < mc; ++k) xs.push_back(lerp(pb, xb, static_cast<double>(k) / mc));
  std::vector<AnnulusPoint> s;
  for (const auto& x : xs) s.push_back(from_delta_chart(r0, x));
  if (tn > 0) s.push_back(line.samples.back());
  s.front() = line.samples.front();
  best.curve = make_curve(std::move(s));
  best.connector_length = 2 * tn;
  best.C = 2;
  return best;
}

UniformDistance uniform_distance(const DistanceSample& a, const DistanceSample& b) {
  require(a.n() == b.n(), "uniform distance needs the same point set");
  for (int k = 0; k < a.n(); ++k) {
    const auto& p = a.points[k];
    const auto& q = b.points[k];
    require(p.t == q.t && p.theta == q.theta && p.phi == q.phi,
            "uniform distance needs the same point set");
  }
  UniformDistance u;
  u.value = 0;
  for (int i = 0; i < a.n(); ++i)
    for (int j = i + 1; j < a.n(); ++j) {
      const double d = std::abs(a.at(i, j) - b.at(i, j));
      if (d > u.value) u = {d, i, j};
    }
  return u;
}

double separation_height(double C_M, double diam) { return std::sqrt(C_M * (diam + C_M)); }

EmbeddingReport embedding_constant(const DistanceSample& sub, const DistanceSample& full) {
  std::vector<int> map(sub.n(), -1);
  for (int a = 0; a < sub.n(); ++a) {
    const auto& p = sub.points[a];
    for (int b = 0; b < full.n(); ++b) {
      const auto& q = full.points[b];
      if (p.t == q.t && p.theta == q.theta && p.phi == q.phi) {
        map[a] = b;
        break;
      }
    }
    require(map[a] >= 0, "subregion point missing from the full sample");
  }
  EmbeddingReport r;
  double c = -kInf;
  for (int i = 0; i < sub.n(); ++i)
    for (int j = i + 1; j < sub.n(); ++j) {
      const double d = sub.at(i, j) - full.at(map[i], map[j]);
      if (d > c) {
        c = d;
        r.argmax_pair = {sub.points[i], sub.points[j]};
      }
    }
  r.C_M = std::max(c, 0.0);
  r.diam = sub.max();
  r.S_M = separation_height(r.C_M, r.diam);
  return r;
}

double SwifBoundReport::term(const std::string& name) const {
  for (const auto& [k, v] : terms)
    if (k == name) return v;
  throw InputError("no bound term named " + name);
}

SwifBoundReport swif_pair_bound(const SwifPairInputs& in) {
  for (auto [v, n] : {std::pair{in.S1, "S1"}, {in.V1, "V1"}, {in.A1, "A1"}, {in.S2, "S2"},
                      {in.V2, "V2"}, {in.A2, "A2"}, {in.W, "W"}, {in.V, "V"}})
    require_nonneg(v, n);
  SwifBoundReport r;
  r.terms = {{"S1*(V1+A1)", in.S1 * (in.V1 + in.A1)},
             {"S2*(V2+A2)", in.S2 * (in.V2 + in.A2)},
             {"filling_volume", in.W},
             {"wall_volume", in.V}};
  for (const auto& t : r.terms) r.total += t.second;
  return r;
}

SwifBoundReport swif_excision_bound(const SwifExcisionInputs& in) {
  for (auto [v, n] : {std::pair{in.S0, "S0"}, {in.VA0, "VA0"}, {in.collar0, "collar0"},
                      {in.inner, "inner"}, {in.Si, "Si"}, {in.VAi, "VAi"}, {in.collar_i, "collar_i"}})
    require_nonneg(v, n);
  SwifBoundReport r;
  r.terms = {{"S0k*(V0+A0)", in.S0 * in.VA0},
             {"collar_volume_0", in.collar0},
             {"inner", in.inner},
             {"Sik*(Vi+Ai)", in.Si * in.VAi},
             {"collar_volume_i", in.collar_i}};
  for (const auto& t : r.terms) r.total += t.second;
  return r;
}

HlsBounds hls_bounds_from_eps(double eps, double lambda, double mass_term, int n) {
  require_nonneg(eps, "eps");
  require_nonneg(mass_term, "mass_term");
  require(lambda >= 1 && std::isfinite(lambda), "lambda must be >= 1");
  require(n >= 1, "dimension must be >= 1");
  HlsBounds b;
  b.eps = eps;
  b.gh_bound = 2 * eps;
  b.swif_bound = std::pow(2.0, 0.5 * (n + 1)) * std::pow(lambda, n + 1) * 2 * eps * mass_term;
  return b;
}

HlsBounds hls_bounds(const DistanceSample& dsJ, const DistanceSample& dsInf, double lambda,
                     double mass_term, int n) {
  const UniformDistance u = uniform_distance(dsJ, dsInf);
  HlsBounds b = hls_bounds_from_eps(u.value, lambda, mass_term, n);
  b.ratio_min = kInf;
  b.ratio_max = 0;
  for (int i = 0; i < dsJ.n(); ++i)
    for (int j = i + 1; j < dsJ.n(); ++j) {
      const double dj = dsJ.at(i, j), di = dsInf.at(i, j);
      if (di <= 0 && dj <= 0) continue;
      const double r = di > 0 ? dj / di : kInf;
      b.ratio_min = std::min(b.ratio_min, r);
      b.ratio_max = std::max(b.ratio_max, r);
      if (r < (1 - 1e-12) / lambda || r > lambda * (1 + 1e-12)) {
        std::ostringstream msg;
        msg << "distance ratio " << r << " outside [1/lambda, lambda] at pair (" << i << ", " << j
            << ")";
        throw InputError(msg.str());
      }
    }
  if (b.ratio_max == 0) b.ratio_min = b.ratio_max = 1;
  return b;
}

namespace {

std::vector<double> leaf_series(const AnnulusField& f, bool inverse_H) {
  std::vector<double> out(f.time.n_t);
  std::vector<double> vals(f.leaf_size());
  for (int k = 0; k < f.time.n_t; ++k) {
    if (!inverse_H) {
      out[k] = leaf_area(f, k);
      continue;
    }
    const long base = f.index(k, 0, 0);
    for (long m = 0; m < f.leaf_size(); ++m) vals[m] = 1 / f.H[base + m];
    out[k] = integrate_leaf(f, k, vals);
  }
  return out;
}

}  // namespace

double annulus_volume(const AnnulusField& f, double a, double b) {
  require(a >= 0 && b <= f.time.T + 1e-12 && a <= b, "volume window must lie in [0, T]");
  if (a == b) return 0;
  return integrate_time(f.time, leaf_series(f, true), a, std::min(b, f.time.T));
}

double leaf_area_at(const AnnulusField& f, double t) {
  return interp_time(f.time, leaf_series(f, false), t);
}

VolumeCheck volume_bound_check(const AnnulusField& f, const Envelope& h, CollarWidths collar) {
  require(static_cast<bool>(h), "volume check needs an envelope");
  const double T = f.time.T;
  require(collar.lower >= 0 && collar.upper >= 0 && collar.lower + collar.upper <= T + 1e-12,
          "collar widths must be >= 0 and fit in [0, T]");
  VolumeCheck c;
  c.worst_excess = -kInf;
  for (int k = 0; k < f.time.n_t; ++k) {
    const double hk = h(f.time.t(k));
    for (long m = f.index(k, 0, 0); m < f.index(k, 0, 0) + f.leaf_size(); ++m)
      c.worst_excess = std::max(c.worst_excess, 1 / f.H[m] - hk);
  }
  c.envelope_ok = c.worst_excess <= 1e-12 * (1 + std::abs(h(0)));
  const std::vector<double> vol = leaf_series(f, true);
  const double area0 = leaf_area(f, 0);
  c.vol = integrate_time(f.time, vol, 0, T);
  c.bound = area0 * std::exp(T) * integrate_envelope(h, 0, T);
  const double t1 = collar.lower, t2 = T - collar.upper;
  c.collar_vol = (t1 > 0 ? integrate_time(f.time, vol, 0, t1) : 0) +
                 (t2 < T ? integrate_time(f.time, vol, t2, T) : 0);
  c.collar_bound =
      area0 * std::exp(T) * (integrate_envelope(h, 0, t1) + integrate_envelope(h, t2, T));
  return c;
}

double leaf_diameter_max(const AnnulusField& f, int n_levels) {
  require(n_levels >= 1, "need at least one level");
  double d = 0;
  if (f.rotsym) {
    for (int k = 0; k < f.time.n_t; ++k) d = std::max(d, kPi * std::sqrt(f.g[f.index(k, 0, 0)].xx));
    return d;
  }
  for (int l = 0; l < n_levels; ++l) {
    const double t = n_levels == 1 ? 0 : f.time.T * l / (n_levels - 1);
    auto pts = fibonacci_points(8, {t});
    for (int d = 0; d < 8; ++d)
      pts.push_back({t, kPi - pts[d].theta, std::fmod(pts[d].phi + kPi, 2 * kPi)});
    const DistanceSample ds = graph_sample(f, pts, 1, t, t);
    d = std::max(d, ds.max());
  }
  return d;
}

DiameterCheck diameter_bound_check(const AnnulusField& f, const Envelope& h, double D_leaf,
                                   const DistanceSample& sample) {
  require(static_cast<bool>(h), "diameter check needs an envelope");
  require_nonneg(D_leaf, "D_leaf");
  DiameterCheck c;
  const double T = f.time.T;
  c.diam_est = sample.max();
  c.bound = integrate_envelope(h, 0, T) + D_leaf;
  c.leaf_diam_max = leaf_diameter_max(f);
  c.leaf_ok = c.leaf_diam_max <= D_leaf * (1 + 1e-9);
  double H0 = kInf;
  for (int k = 0; k < f.time.n_t; ++k) {
    const double hk = h(f.time.t(k));
    for (int i = 0; i < f.sphere.n_theta; ++i) {
      const Sym2 sig = round_metric(f.sphere.sin_theta[i]);
      for (int j = 0; j < f.sphere.n_phi; ++j) {
        const long m = f.index(k, i, j);
        H0 = std::min(H0, f.H[m]);
        c.c1 = std::max(c.c1, relative_eigenvalues(f.g[m], sig).second);
        if (1 / f.H[m] > hk * (1 + 1e-12)) c.envelope_ok = false;
      }
    }
  }
  c.control_bound = std::max({1 / H0, c.c1, 1.0}) * std::sqrt(T * T + kPi * kPi);
  return c;
}

WellEmbeddedGap well_embedded_gap(const AnnulusField& f, std::pair<double, double> Wj,
                                  std::pair<double, double> Wk, int n_dirs, int n_levels,
                                  int refinement) {
  const double T = f.time.T;
  require(Wk.first >= 0 && Wk.second <= T && Wk.first <= Wj.first && Wj.first <= Wj.second &&
              Wj.second <= Wk.second,
          "windows must be nested: 0 <= Wk.lo <= Wj.lo <= Wj.hi <= Wk.hi <= T");
  require(n_levels >= 1, "need at least one level");
  std::vector<double> levels;
  for (int l = 0; l < n_levels; ++l)
    levels.push_back(n_levels == 1 ? Wj.first
                                   : Wj.first + (Wj.second - Wj.first) * l / (n_levels - 1));
  const auto pts = fibonacci_points(n_dirs, levels);
  const GridGraph g(f, refinement, {Wj.first, Wj.second, Wk.first, Wk.second});
  WellEmbeddedGap out;
  out.gap = 0;
  bool first = true;
  for (size_t i = 0; i < pts.size(); ++i) {
    const std::vector<AnnulusPoint> rest(pts.begin() + i + 1, pts.end());
    if (rest.empty()) break;
    const auto dk = g.distances(pts[i], rest, Wk.first, Wk.second);
    const auto df = g.distances(pts[i], rest, 0, T);
    for (size_t j = 0; j < rest.size(); ++j) {
      const double d = dk[j] - df[j];
      if (first || d > out.gap) {
        out.gap = d;
        out.argmax_pair = {pts[i], rest[j]};
        first = false;
      }
    }
  }
  out.gap = std::max(out.gap, 0.0);
  return out;
}

AnnulusField bar_field(const AnnulusField& f) {
  AnnulusField b = f;
  for (int k = 0; k < f.time.n_t; ++k) {
    const double Hb = 2 / f.r0 * std::exp(-f.time.t(k) / 2);
    for (long m = f.index(k, 0, 0); m < f.index(k, 0, 0) + f.leaf_size(); ++m) {
      b.A[m] = f.A[m] * (Hb / f.H[m]);
      b.H[m] = Hb;
    }
  }
  b.label = f.label + "/bar";
  return b;
}

DistanceLowerBound distance_lower_bound_check(const AnnulusField& fJ, double j, double D,
                                              const std::vector<AnnulusPoint>& pts) {
  require(j > 0 && std::isfinite(j), "j must be positive");
  require_nonneg(D, "D");
  const double r0 = fJ.r0;
  DistanceLowerBound r;
  r.hypothesis_worst = kInf;
  double lam_min = kInf;
  for (int k = 0; k < fJ.time.n_t; ++k) {
    const double e = std::exp(fJ.time.t(k));
    for (int i = 0; i < fJ.sphere.n_theta; ++i) {
      const Sym2 sig = round_metric(fJ.sphere.sin_theta[i]) * (r0 * r0 * e);
      for (int jj = 0; jj < fJ.sphere.n_phi; ++jj) {
        const long m = fJ.index(k, i, jj);
        r.hypothesis_worst =
            std::min(r.hypothesis_worst, 1 / (fJ.H[m] * fJ.H[m]) - 0.25 * r0 * r0 * e + 1 / j);
        lam_min = std::min(lam_min, relative_eigenvalues(fJ.g[m], sig).first);
      }
    }
  }
  r.hypothesis_ok = r.hypothesis_worst >= -1e-12 * r0 * r0;
  r.C = j * std::max(0.0, 1 - lam_min);
  r.floor_hat_bar = -D / std::sqrt(j);
  r.floor_bar_delta = r.C < j ? -D / (std::sqrt(j) * (1 - r.C / j)) : -kInf;
  if (!r.hypothesis_ok) return r;

  const AnnulusField bar = bar_field(fJ);
  const AnnulusField del = build_delta(r0, fJ.time.T, fJ.grid_spec());
  const Shooter sh(fJ), sb(bar), sd(del);
  r.min_hat_bar = r.min_bar_delta = kInf;
  for (size_t a = 0; a < pts.size(); ++a)
    for (size_t b = a + 1; b < pts.size(); ++b) {
      const double dh = sh.distance(pts[a], pts[b]).distance;
      const double db = sb.distance(pts[a], pts[b]).distance;
      const double dd = sd.distance(pts[a], pts[b]).distance;
      r.min_hat_bar = std::min(r.min_hat_bar, dh - db);
      r.min_bar_delta = std::min(r.min_bar_delta, db - dd);
    }
  if (pts.size() < 2) r.min_hat_bar = r.min_bar_delta = 0;
  r.pass_hat_bar = r.min_hat_bar >= r.floor_hat_bar;
  r.pass_bar_delta = r.min_bar_delta >= r.floor_bar_delta;
  return r;
}

}  // namespace imcf
