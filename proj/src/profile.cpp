#include "imcflab/profile.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_odeiv2.h>
#include <gsl/gsl_spline.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <memory>

#include "imcflab/common.hpp"
#include "imcflab/leaf.hpp"

namespace imcf {

std::string to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::flat: return "flat";
    case FamilyKind::schwarzschild: return "schwarzschild";
    case FamilyKind::gravity_well: return "gravity_well";
    case FamilyKind::custom: return "custom";
  }
  return "custom";
}

FamilyKind family_kind_from_string(const std::string& s) {
  if (s == "flat") return FamilyKind::flat;
  if (s == "schwarzschild") return FamilyKind::schwarzschild;
  if (s == "gravity_well") return FamilyKind::gravity_well;
  throw InputError("unknown family kind '" + s + "'");
}

void validate_family(const FamilyParams& p) {
  require(std::isfinite(p.r0) && p.r0 > 0, "r0 must be positive");
  require(std::isfinite(p.m) && p.m >= 0, "m must be >= 0");
  if (p.kind == FamilyKind::schwarzschild)
    require(p.r0 > 2 * p.m, "horizon violation: f(0) = " + std::to_string(p.r0) +
                                " <= 2m = " + std::to_string(2 * p.m));
  if (p.kind == FamilyKind::gravity_well) {
    require(std::isfinite(p.well_width) && p.well_width > 0, "well_width must be > 0");
    require(p.well_depth >= 0, "well_depth must be >= 0");
    require(p.well_depth < 1, "well_depth " + std::to_string(p.well_depth) +
                                  " >= 1 makes f' reach 0 at the bottom of the well");
    require(p.well_recovery >= 0 && p.well_recovery <= 1, "well_recovery must lie in [0,1]");
    require(p.well_recovery_width >= 0, "well_recovery_width must be >= 0");
    require(p.well_start >= 0, "well_start must be >= 0");
  }
}

namespace {

// Quintic Hermite basis on [0,1] as coefficient rows (degree 0..5), order:
// value_a, slope_a, curv_a, curv_b, slope_b, value_b.
constexpr double kHermite[6][6] = {
    {1, 0, 0, -10, 15, -6}, {0, 1, 0, -6, 8, -3},     {0, 0, 0.5, -1.5, 1.5, -0.5},
    {0, 0, 0, 0.5, -1, 0.5}, {0, 0, 0, -4, 7, -3}, {0, 0, 0, 10, -15, 6}};

void poly_eval(const double* c, double u, double& v, double& d1, double& d2) {
  v = d1 = d2 = 0;
  for (int p = 5; p >= 0; --p) {
    d2 = d2 * u + 2 * d1;
    d1 = d1 * u + v;
    v = v * u + c[p];
  }
}

struct WellShape {
  double depth, start, wd, rec, wr;
  explicit WellShape(const FamilyParams& p)
      : depth(p.well_depth),
        start(p.well_start),
        wd(p.well_width / 2),
        rec(p.well_recovery),
        wr(p.well_recovery_width > 0 ? p.well_recovery_width : p.well_width / 2) {}
  double f(double r0, double s) const {
    return r0 + s -
           depth * (wd * smoothstep_int((s - start) / wd) -
                    rec * wr * smoothstep_int((s - start - wd) / wr));
  }
  double fp(double s) const {
    return 1 - depth * (smoothstep((s - start) / wd) - rec * smoothstep((s - start - wd) / wr));
  }
  double fpp(double s) const {
    return -depth * (smoothstep_d1((s - start) / wd) / wd -
                     rec * smoothstep_d1((s - start - wd) / wr) / wr);
  }
};

int schwarzschild_rhs(double, const double y[], double dydt[], void* params) {
  const double m = *static_cast<double*>(params);
  const double q = 1 - 2 * m / y[0];
  if (q < 0) return GSL_EDOM;
  dydt[0] = std::sqrt(q);
  return GSL_SUCCESS;
}

std::vector<double> uniform_nodes(double s_max, int n) {
  require(n >= 3, "profile needs at least 3 nodes");
  require(std::isfinite(s_max) && s_max > 0, "profile s range must be positive");
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = s_max * i / (n - 1);
  s.back() = s_max;
  return s;
}

}  // namespace

void RotSymProfile::eval(double x, double out[3]) const {
  const int n = static_cast<int>(s.size());
  int a = static_cast<int>(std::upper_bound(s.begin(), s.end(), x) - s.begin()) - 1;
  a = std::clamp(a, 0, n - 2);
  const double h = s[a + 1] - s[a];
  const double u = (x - s[a]) / h;
  const double coef[6] = {f[a], h * fp[a], h * h * fpp[a], h * h * fpp[a + 1], h * fp[a + 1],
                          f[a + 1]};
  out[0] = out[1] = out[2] = 0;
  for (int b = 0; b < 6; ++b) {
    double v, d1, d2;
    poly_eval(kHermite[b], u, v, d1, d2);
    out[0] += coef[b] * v;
    out[1] += coef[b] * d1 / h;
    out[2] += coef[b] * d2 / (h * h);
  }
  // closed-form derivatives avoid the f/h^2 cancellation in the Hermite f''
  switch (params.kind) {
    case FamilyKind::flat:
      out[1] = 1;
      out[2] = 0;
      break;
    case FamilyKind::schwarzschild:
      out[1] = std::sqrt(1 - 2 * params.m / out[0]);
      out[2] = params.m / (out[0] * out[0]);
      break;
    case FamilyKind::gravity_well: {
      const WellShape w(params);
      out[0] = w.f(params.r0, x);
      out[1] = w.fp(x);
      out[2] = w.fpp(x);
      break;
    }
    case FamilyKind::custom:
      break;
  }
}

double RotSymProfile::eval_f(double x) const {
  double o[3];
  eval(x, o);
  return o[0];
}
double RotSymProfile::eval_fp(double x) const {
  double o[3];
  eval(x, o);
  return o[1];
}
double RotSymProfile::eval_fpp(double x) const {
  double o[3];
  eval(x, o);
  return o[2];
}

void validate_profile(const RotSymProfile& p) {
  const size_t n = p.s.size();
  require(n >= 3 && p.f.size() == n && p.fp.size() == n && p.fpp.size() == n,
          "profile arrays have inconsistent lengths");
  for (size_t i = 0; i < n; ++i) {
    require(std::isfinite(p.s[i]) && std::isfinite(p.f[i]) && std::isfinite(p.fp[i]) &&
                std::isfinite(p.fpp[i]),
            "profile has non-finite samples");
    if (i > 0) require(p.s[i] > p.s[i - 1], "profile s nodes must increase");
    require(p.f[i] > 0, "profile f must be positive (node " + std::to_string(i) + ")");
    require(p.fp[i] > 0, "profile f' must be positive: f'(" + std::to_string(p.s[i]) +
                             ") = " + std::to_string(p.fp[i]));
  }
}

namespace {

int auto_node_count(const FamilyParams& params, double s_max) {
  double h = params.r0 / 400;
  if (params.kind == FamilyKind::gravity_well) {
    const double wr =
        params.well_recovery_width > 0 ? params.well_recovery_width : params.well_width / 2;
    h = std::min(h, std::min(params.well_width / 2, wr) / 50);
  }
  const double n = std::ceil(s_max / h) + 1;
  return static_cast<int>(std::clamp(n, 101.0, 200001.0));
}

}  // namespace

RotSymProfile make_profile(const FamilyParams& params, double s_max, int n_nodes) {
  validate_family(params);
  require(n_nodes >= 0, "n_nodes must be >= 0");
  if (n_nodes == 0) n_nodes = auto_node_count(params, s_max);
  RotSymProfile p;
  p.params = params;
  p.label = to_string(params.kind);
  p.s = uniform_nodes(s_max, n_nodes);
  const int n = n_nodes;
  p.f.resize(n);
  p.fp.resize(n);
  p.fpp.resize(n);
  const double r0 = params.r0;
  switch (params.kind) {
    case FamilyKind::flat:
      for (int i = 0; i < n; ++i) {
        p.f[i] = r0 + p.s[i];
        p.fp[i] = 1;
        p.fpp[i] = 0;
      }
      break;
    case FamilyKind::schwarzschild: {
      double m = params.m;
      gsl_odeiv2_system sys{schwarzschild_rhs, nullptr, 1, &m};
      std::unique_ptr<gsl_odeiv2_driver, decltype(&gsl_odeiv2_driver_free)> drv(
          gsl_odeiv2_driver_alloc_y_new(&sys, gsl_odeiv2_step_rk8pd, 1e-4, 1e-14, 1e-14),
          gsl_odeiv2_driver_free);
      double y[1] = {r0}, s = 0;
      p.f[0] = r0;
      for (int i = 1; i < n; ++i) {
        const int st = gsl_odeiv2_driver_apply(drv.get(), &s, p.s[i], y);
        if (st != GSL_SUCCESS) throw InputError("Schwarzschild profile integration failed");
        p.f[i] = y[0];
      }
      for (int i = 0; i < n; ++i) {
        p.fp[i] = std::sqrt(1 - 2 * m / p.f[i]);
        p.fpp[i] = m / (p.f[i] * p.f[i]);
      }
      p.label += "(m=" + std::to_string(m) + ")";
      break;
    }
    case FamilyKind::gravity_well: {
      const WellShape w(params);
      for (int i = 0; i < n; ++i) {
        p.f[i] = w.f(r0, p.s[i]);
        p.fp[i] = w.fp(p.s[i]);
        p.fpp[i] = w.fpp(p.s[i]);
      }
      break;
    }
    case FamilyKind::custom:
      throw InputError("custom profiles are built from samples or functions");
  }
  validate_profile(p);
  return p;
}

RotSymProfile make_profile_for_time(const FamilyParams& params, double T, int n_nodes) {
  validate_family(params);
  require(std::isfinite(T) && T >= 0, "T must be finite and >= 0");
  double min_fp = 1;
  if (params.kind == FamilyKind::schwarzschild) min_fp = std::sqrt(1 - 2 * params.m / params.r0);
  if (params.kind == FamilyKind::gravity_well) min_fp = 1 - params.well_depth;
  require(min_fp > 0, "profile has f' <= 0");
  double s_max = params.r0 * (std::exp(T / 2) - 1) / min_fp * 1.02 + 1e-3 * params.r0;
  if (params.kind == FamilyKind::gravity_well)
    s_max = std::max(s_max, params.well_start + 1.02 * params.well_width);
  return make_profile(params, s_max, n_nodes);
}

RotSymProfile profile_from_functions(const std::vector<double>& s, const RadialFn& f,
                                     const RadialFn& fp, const RadialFn& fpp,
                                     std::string label) {
  RotSymProfile p;
  p.params.kind = FamilyKind::custom;
  p.label = std::move(label);
  p.s = s;
  for (double x : s) {
    p.f.push_back(f(x));
    p.fp.push_back(fp(x));
    p.fpp.push_back(fpp(x));
  }
  validate_profile(p);
  p.params.r0 = p.f.front();
  return p;
}

RotSymProfile profile_from_samples(const std::vector<double>& s, const std::vector<double>& f,
                                   std::string label) {
  require(s.size() == f.size() && s.size() >= 3, "profile samples need matching lengths >= 3");
  for (size_t i = 1; i < s.size(); ++i) require(s[i] > s[i - 1], "profile s nodes must increase");
  std::unique_ptr<gsl_spline, decltype(&gsl_spline_free)> sp(
      gsl_spline_alloc(gsl_interp_cspline, s.size()), gsl_spline_free);
  std::unique_ptr<gsl_interp_accel, decltype(&gsl_interp_accel_free)> acc(gsl_interp_accel_alloc(),
                                                                          gsl_interp_accel_free);
  gsl_spline_init(sp.get(), s.data(), f.data(), s.size());
  RotSymProfile p;
  p.params.kind = FamilyKind::custom;
  p.label = std::move(label);
  p.s = s;
  p.f = f;
  for (double x : s) {
    p.fp.push_back(gsl_spline_eval_deriv(sp.get(), x, acc.get()));
    p.fpp.push_back(gsl_spline_eval_deriv2(sp.get(), x, acc.get()));
  }
  validate_profile(p);
  p.params.r0 = p.f.front();
  return p;
}

std::vector<double> mean_curvature_profile(const RotSymProfile& p) {
  std::vector<double> H(p.s.size());
  for (size_t i = 0; i < H.size(); ++i) H[i] = 2 * p.fp[i] / p.f[i];
  return H;
}

std::vector<double> scalar_curvature_profile(const RotSymProfile& p) {
  std::vector<double> R(p.s.size());
  for (size_t i = 0; i < R.size(); ++i)
    R[i] = 2 * (1 - p.fp[i] * p.fp[i]) / (p.f[i] * p.f[i]) - 4 * p.fpp[i] / p.f[i];
  return R;
}

std::vector<double> hawking_mass_profile(const RotSymProfile& p) {
  std::vector<double> m(p.s.size());
  for (size_t i = 0; i < m.size(); ++i) m[i] = p.f[i] / 2 * (1 - p.fp[i] * p.fp[i]);
  return m;
}

double ricci_normal(const RotSymProfile& p, double s) {
  double o[3];
  p.eval(s, o);
  return -2 * o[2] / o[0];
}

double scalar_curvature_at(const RotSymProfile& p, double s) {
  double o[3];
  p.eval(s, o);
  return 2 * (1 - o[1] * o[1]) / (o[0] * o[0]) - 4 * o[2] / o[0];
}

double imcf_time_of_s(const RotSymProfile& p, double s) {
  return 2 * std::log(p.eval_f(s) / p.f.front());
}

double s_of_imcf_time(const RotSymProfile& p, double t) {
  const double target = p.f.front() * std::exp(t / 2);
  require(t >= 0 && target <= p.f.back() * (1 + 1e-14),
          "flow time " + std::to_string(t) + " lies outside the profile range");
  if (t == 0) return p.s.front();
  int a = static_cast<int>(std::upper_bound(p.f.begin(), p.f.end(), target) - p.f.begin()) - 1;
  a = std::clamp(a, 0, static_cast<int>(p.s.size()) - 2);
  double lo = p.s[a], hi = p.s[a + 1];
  double x = lo + (hi - lo) * (target - p.f[a]) / (p.f[a + 1] - p.f[a]);
  for (int it = 0; it < 60; ++it) {
    double o[3];
    p.eval(x, o);
    const double r = o[0] - target;
    if (r > 0) hi = x; else lo = x;
    double nx = x - r / o[1];
    if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
    if (std::abs(nx - x) <= 1e-15 * std::max(1.0, std::abs(x))) return nx;
    x = nx;
  }
  return x;
}

AnnulusField reparam_to_imcf_time(const RotSymProfile& p, double T, const GridSpec& grid) {
  validate_profile(p);
  const double r0 = p.f.front();
  require(p.f.back() >= r0 * std::exp(T / 2) * (1 - 1e-14),
          "profile ends before flow time T = " + std::to_string(T));
  auto F = [r0](double t) { return r0 * std::exp(t / 2); };
  auto H = [&](double t) { return 2 * p.eval_fp(s_of_imcf_time(p, t)) / F(t); };
  AnnulusField f = field_from_radial(r0, T, grid, H, F, p.label);
  return f;
}

bool ClassReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckEntry& c) { return c.pass; });
}

const CheckEntry& ClassReport::get(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw InputError("no check named " + name);
}

ClassReport validate_class_membership(const AnnulusField& f, const ClassBounds& b) {
  ClassReport rep;
  CheckEntry lo{"H_lower", true, INFINITY, INFINITY, -1};
  CheckEntry hi{"H_upper", true, -INFINITY, INFINITY, -1};
  CheckEntry ab{"A_bound", true, -INFINITY, INFINITY, -1};
  const long n = f.node_count();
  for (long m = 0; m < n; ++m) {
    const double H = f.H[m];
    if (H < lo.worst) {
      lo.worst = H;
      lo.node = m;
    }
    if (H > hi.worst) {
      hi.worst = H;
      hi.node = m;
    }
    const double a = std::sqrt(tensor_inner(f.g[m].inverse(), f.A[m], f.A[m]));
    if (a > ab.worst) {
      ab.worst = a;
      ab.node = m;
    }
  }
  lo.margin = lo.worst - b.H0;
  hi.margin = b.H1 - hi.worst;
  ab.margin = b.A1 - ab.worst;
  lo.pass = lo.margin >= 0;
  hi.pass = hi.margin >= 0;
  ab.pass = ab.margin >= 0;
  rep.checks = {lo, hi, ab};

  CheckEntry rad{"area_radius", true, 0, 0, -1};
  rad.worst = std::sqrt(leaf_area(f, 0) / (4 * kPi));
  rad.margin = -std::abs(rad.worst - b.r0) / b.r0;
  rad.pass = -rad.margin <= 1e-8;
  rep.checks.push_back(rad);

  CheckEntry mh{"hawking_mass_nonneg", true, 0, 0, -1};
  mh.worst = hawking_mass(f, 0);
  mh.margin = mh.worst;
  mh.pass = mh.worst >= -1e-10 * std::max(1.0, b.r0);
  rep.checks.push_back(mh);
  return rep;
}

void write_profile_csv(const RotSymProfile& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const auto H = mean_curvature_profile(p), R = scalar_curvature_profile(p),
             M = hawking_mass_profile(p);
  out << "s,f,fp,fpp,R,H,m_H\n" << std::setprecision(17);
  for (size_t i = 0; i < p.s.size(); ++i)
    out << p.s[i] << ',' << p.f[i] << ',' << p.fp[i] << ',' << p.fpp[i] << ',' << R[i] << ','
        << H[i] << ',' << M[i] << '\n';
  if (!out) throw std::runtime_error("write failed for " + path);
  nlohmann::ordered_json j = {{"kind", to_string(p.params.kind)},
                              {"label", p.label},
                              {"r0", p.params.r0},
                              {"m", p.params.m},
                              {"well_depth", p.params.well_depth},
                              {"well_width", p.params.well_width},
                              {"well_start", p.params.well_start},
                              {"well_recovery", p.params.well_recovery},
                              {"well_recovery_width", p.params.well_recovery_width},
                              {"nodes", p.s.size()}};
  std::ofstream side(path + ".json");
  if (!side) throw std::runtime_error("cannot write " + path + ".json");
  side << j.dump(2) << '\n';
}

}  // namespace imcf
