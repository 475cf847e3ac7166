#include "imcflab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "imcflab/common.hpp"
#include "imcflab/leaf.hpp"

namespace imcf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CurvatureFields sized(const AnnulusField& f) {
  const size_t n = static_cast<size_t>(f.node_count());
  return {std::vector<double>(n), std::vector<double>(n), std::vector<double>(n),
          std::vector<double>(n)};
}

void fill_K(const AnnulusField& f, CurvatureFields& c) {
  for (int k = 0; k < f.time.n_t; ++k) {
    const long base = f.index(k, 0, 0);
    if (f.rotsym) {
      for (long m = 0; m < f.leaf_size(); ++m) c.K[base + m] = 1 / f.g[base + m].xx;
    } else {
      const auto K = gauss_curvature(f, k);
      std::copy(K.begin(), K.end(), c.K.begin() + base);
    }
  }
}

void check_sizes(const AnnulusField& f, const CurvatureFields& c) {
  const size_t n = static_cast<size_t>(f.node_count());
  require(c.R.size() == n && c.Rc_nn.size() == n && c.K.size() == n && c.K12.size() == n,
          "curvature fields do not match the field grid");
}

// Leaf gradient of H at (k, i, j) in coordinates.
std::pair<double, double> grad_H(const AnnulusField& f, const LeafDiff& ld, int k, int i, int j) {
  auto H = [&](int ii, int jj) { return f.H[f.index(k, ii, jj)]; };
  return {ld.d_theta(H, 1, i, j), ld.d_phi(H, i, j)};
}

}  // namespace

CurvatureFields curvature_from_functions(const AnnulusField& f, const AmbientFn& fn) {
  require(static_cast<bool>(fn), "curvature callback is empty");
  CurvatureFields c = sized(f);
  for (int k = 0; k < f.time.n_t; ++k)
    for (int i = 0; i < f.sphere.n_theta; ++i)
      for (int j = 0; j < f.sphere.n_phi; ++j) {
        const long m = f.index(k, i, j);
        const AmbientCurvature a = fn(f.time.t(k), f.sphere.theta[i], f.sphere.phi(j));
        require(std::isfinite(a.R) && std::isfinite(a.Rc_nn), "non-finite curvature sample");
        c.R[m] = a.R;
        c.Rc_nn[m] = a.Rc_nn;
        c.K12[m] = 0.5 * a.R - a.Rc_nn;
      }
  fill_K(f, c);
  return c;
}

CurvatureFields curvature_from_profile(const AnnulusField& f, const RotSymProfile& p) {
  require(f.rotsym, "profile curvature needs a rotationally symmetric field");
  require(std::abs(p.f.front() - f.r0) <= 1e-12 * f.r0, "profile and field disagree on r0");
  CurvatureFields c = sized(f);
  for (int k = 0; k < f.time.n_t; ++k) {
    const double s = s_of_imcf_time(p, f.time.t(k));
    const double R = scalar_curvature_at(p, s), Rc = ricci_normal(p, s);
    const long base = f.index(k, 0, 0);
    for (long m = base; m < base + f.leaf_size(); ++m) {
      c.R[m] = R;
      c.Rc_nn[m] = Rc;
      c.K12[m] = 0.5 * R - Rc;
    }
  }
  fill_K(f, c);
  return c;
}

CurvatureFields flat_curvature(const AnnulusField& f) {
  return curvature_from_functions(f, [](double, double, double) { return AmbientCurvature{}; });
}

double gauss_equation_residual(const AnnulusField& f, const CurvatureFields& c) {
  check_sizes(f, c);
  double worst = 0;
  for (long m = 0; m < f.node_count(); ++m) {
    const auto [l1, l2] = relative_eigenvalues(f.A[m], f.g[m]);
    worst = std::max(worst, std::abs(c.K[m] - l1 * l2 - c.K12[m]));
  }
  return worst;
}

const std::vector<std::string>& GoToZeroReport::names() {
  static const std::vector<std::string> n{"gradH2_over_H2", "lambda_gap2", "R", "Rc_nn", "K12",
                                          "H2",             "A2",          "l1l2", "chi"};
  return n;
}

const std::vector<double>& GoToZeroReport::targets() {
  static const std::vector<double> t{0, 0, 0, 0, 0, 16 * kPi, 8 * kPi, 4 * kPi, 2};
  return t;
}

std::vector<double> GoToZeroReport::values(const GoToZeroLeaf& l) {
  return {l.gradH2_over_H2, l.lambda_gap2, l.R, l.Rc_nn, l.K12, l.H2, l.A2, l.l1l2, l.chi};
}

std::vector<double> GoToZeroReport::max_gaps() const {
  std::vector<double> g(names().size(), 0.0);
  for (const auto& l : leaves) {
    const auto v = values(l);
    for (size_t q = 0; q < v.size(); ++q) g[q] = std::max(g[q], std::abs(v[q] - targets()[q]));
  }
  return g;
}

GoToZeroReport gotozero_report(const AnnulusField& f, const CurvatureFields& c, int stride) {
  check_sizes(f, c);
  require(stride >= 1, "stride must be >= 1");
  const LeafDiff ld(f.sphere);
  const long L = f.leaf_size();
  GoToZeroReport rep;
  std::vector<std::vector<double>> buf(9, std::vector<double>(L));
  for (int k = 0; k < f.time.n_t; ++k) {
    if (k % stride != 0 && k != f.time.n_t - 1) continue;
    for (int i = 0; i < f.sphere.n_theta; ++i)
      for (int j = 0; j < f.sphere.n_phi; ++j) {
        const long m = f.index(k, i, j), q = static_cast<long>(i) * f.sphere.n_phi + j;
        const Sym2 gi = f.g[m].inverse();
        const auto [l1, l2] = relative_eigenvalues(f.A[m], f.g[m]);
        const auto [hth, hph] = grad_H(f, ld, k, i, j);
        const double H = f.H[m];
        buf[0][q] = gi.quad(hth, hph) / (H * H);
        buf[1][q] = (l1 - l2) * (l1 - l2);
        buf[2][q] = c.R[m];
        buf[3][q] = c.Rc_nn[m];
        buf[4][q] = c.K12[m];
        buf[5][q] = H * H;
        buf[6][q] = tensor_inner(gi, f.A[m], f.A[m]);
        buf[7][q] = l1 * l2;
        buf[8][q] = c.K[m] / (2 * kPi);
      }
    GoToZeroLeaf l;
    l.k = k;
    l.t = f.time.t(k);
    double* out[] = {&l.gradH2_over_H2, &l.lambda_gap2, &l.R,  &l.Rc_nn, &l.K12,
                     &l.H2,             &l.A2,          &l.l1l2, &l.chi};
    for (int q = 0; q < 9; ++q) *out[q] = integrate_leaf(f, k, buf[q]);
    rep.leaves.push_back(l);
  }
  return rep;
}

void write_gotozero_csv(const GoToZeroReport& r, const std::string& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), "cannot open " + path);
  out.precision(17);
  out << "leaf,t,quantity,value,target,gap\n";
  for (const auto& l : r.leaves) {
    const auto v = GoToZeroReport::values(l);
    for (size_t q = 0; q < v.size(); ++q) {
      const double tg = GoToZeroReport::targets()[q];
      out << l.k << ',' << l.t << ',' << GoToZeroReport::names()[q] << ',' << v[q] << ',' << tg
          << ',' << std::abs(v[q] - tg) << '\n';
    }
  }
}

namespace {

// C-infinity transition from 0 to 1 on [0, 1] and its derivative. A polynomial
// smoothstep leaves a kink in phi_t that costs the time quadrature its order.
double ramp_fn(double x) {
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  const double a = std::exp(-1 / x), b = std::exp(-1 / (1 - x));
  return a / (a + b);
}
double ramp_d1(double x) {
  if (x <= 0 || x >= 1) return 0;
  const double a = std::exp(-1 / x), b = std::exp(-1 / (1 - x));
  return a * b * (1 / (x * x) + 1 / ((1 - x) * (1 - x))) / ((a + b) * (a + b));
}

}  // namespace

TestFunction smooth_bump(double t_lo, double t_hi, double ramp, double a, double b) {
  require(ramp > 0 && t_lo + 2 * ramp <= t_hi, "bump ramps must fit inside [t_lo, t_hi]");
  TestFunction tf;
  tf.t_lo = t_lo;
  tf.t_hi = t_hi;
  tf.eval = [=](double t, double th, double ph, double out[4]) {
    const double u = (t - t_lo) / ramp, v = (t_hi - t) / ramp;
    const double B = ramp_fn(u) * ramp_fn(v);
    const double Bt = (ramp_d1(u) * ramp_fn(v) - ramp_fn(u) * ramp_d1(v)) / ramp;
    const double st = std::sin(th), ct = std::cos(th), cp = std::cos(ph), sp = std::sin(ph);
    const double S = 1 + a * ct + b * st * cp;
    out[0] = B * S;
    out[1] = Bt * S;
    out[2] = B * (-a * st + b * ct * cp);
    out[3] = B * (-b * st * sp);
  };
  return tf;
}

TestFunction zero_test_function() {
  TestFunction tf;
  tf.eval = [](double, double, double, double out[4]) { out[0] = out[1] = out[2] = out[3] = 0; };
  return tf;
}

WeakRicciResidual weak_ricci_identity_residual(const AnnulusField& f, const CurvatureFields& c,
                                               const TestFunction& phi, double a, double b,
                                               IdentityForm form) {
  check_sizes(f, c);
  require(static_cast<bool>(phi.eval), "test function is empty");
  require(a >= 0 && b <= f.time.T && a < b, "window must lie in [0, T]");
  const bool zero = phi.t_lo == phi.t_hi;
  require(zero || (phi.t_lo > a && phi.t_hi < b),
          "test function support must stay strictly inside the window");
  const LeafDiff ld(f.sphere);
  const long L = f.leaf_size();
  std::vector<double> lhs_t(f.time.n_t, 0.0), rhs_t(f.time.n_t, 0.0);
  std::vector<double> lv(L), rv(L);
  for (int k = 0; k < f.time.n_t; ++k) {
    const double t = f.time.t(k);
    if (!zero && (t < phi.t_lo || t > phi.t_hi)) continue;
    for (int i = 0; i < f.sphere.n_theta; ++i)
      for (int j = 0; j < f.sphere.n_phi; ++j) {
        const long m = f.index(k, i, j), q = static_cast<long>(i) * f.sphere.n_phi + j;
        double p[4];
        phi.eval(t, f.sphere.theta[i], f.sphere.phi(j), p);
        const Sym2 gi = f.g[m].inverse();
        const auto [hth, hph] = grad_H(f, ld, k, i, j);
        const double H = f.H[m];
        const double gradH2 = gi.quad(hth, hph);
        const double dphi_dH = gi.xx * p[2] * hth + gi.xy * (p[2] * hph + p[3] * hth) +
                               gi.yy * p[3] * hph;
        const double A2 = tensor_inner(gi, f.A[m], f.A[m]);
        lv[q] = 2 * p[0] * c.Rc_nn[m];
        if (form == IdentityForm::corrected)
          rv[q] = p[1] * H * H - 2 * p[0] * gradH2 / (H * H) - 2 * dphi_dH / H +
                  p[0] * (H * H - 2 * A2);
        else
          rv[q] = 2 * p[0] * gradH2 / (H * H) - 2 * dphi_dH / H + p[0] * (H * H - 2 * A2);
      }
    lhs_t[k] = integrate_leaf(f, k, lv);
    rhs_t[k] = integrate_leaf(f, k, rv);
  }
  WeakRicciResidual r;
  const auto w = time_weights(f.time);
  for (int k = 0; k < f.time.n_t; ++k) {
    r.lhs += w[k] * lhs_t[k];
    r.rhs += w[k] * rhs_t[k];
  }
  r.residual = std::abs(r.lhs - r.rhs);
  return r;
}

MaxPrincipleReport max_principle_bound(const AnnulusField& f, const CurvatureFields& c, double C,
                                       int n) {
  check_sizes(f, c);
  require(std::isfinite(C), "C must be finite");
  require(n >= 1, "dimension must be >= 1");
  MaxPrincipleReport r;
  r.C = C;
  r.n = n;
  r.Rc_min = *std::min_element(c.Rc_nn.begin(), c.Rc_nn.end());
  r.hypothesis_ok = r.Rc_min >= -C - 1e-12 * (1 + std::abs(C));
  double hmax0 = 0;
  for (long m = 0; m < f.leaf_size(); ++m) hmax0 = std::max(hmax0, f.H[m]);
  r.C0 = hmax0 * hmax0 - C * n;
  r.min_slack = kInf;
  for (int k = 0; k < f.time.n_t; ++k) {
    const double bound = std::sqrt(r.C0 * std::exp(-2 * f.time.t(k) / n) + C * n);
    r.bound.push_back(bound);
    for (int i = 0; i < f.sphere.n_theta; ++i)
      for (int j = 0; j < f.sphere.n_phi; ++j) {
        const double s = bound - f.H[f.index(k, i, j)];
        r.max_abs_slack = std::max(r.max_abs_slack, std::abs(s));
        if (s < r.min_slack) {
          r.min_slack = s;
          r.witness_k = k;
          r.witness_i = i;
          r.witness_j = j;
        }
      }
  }
  return r;
}

HInverseFloorReport h_inverse_floor_check(const AnnulusField& f, const CurvatureFields& c,
                                          double j, double C1, double C2) {
  check_sizes(f, c);
  require(j > 0 && C1 > 0 && C2 > 0 && std::isfinite(j + C1 + C2),
          "need j, C1, C2 positive and finite");
  const double r0 = f.r0;
  HInverseFloorReport r;
  double h0 = 0;
  for (long m = 0; m < f.leaf_size(); ++m) h0 = std::max(h0, f.H[m] * f.H[m]);
  const double cap = 4 / (r0 * r0) + C1 / j;
  r.initial_ok = h0 <= cap * (1 + 1e-12);
  r.ricci_ok = *std::min_element(c.Rc_nn.begin(), c.Rc_nn.end()) >= -C2 / j * (1 + 1e-12);
  r.hypotheses_ok = r.initial_ok && r.ricci_ok;

  double worst = -kInf;
  for (int k = 0; k < f.time.n_t; ++k) {
    const double floor = 0.25 * r0 * r0 * std::exp(f.time.t(k));
    for (int i = 0; i < f.sphere.n_theta; ++i)
      for (int jj = 0; jj < f.sphere.n_phi; ++jj) {
        const double H = f.H[f.index(k, i, jj)];
        const double d = floor - 1 / (H * H);
        if (d > worst) {
          worst = d;
          r.witness_k = k;
          r.witness_i = i;
          r.witness_j = jj;
        }
      }
    const double chain = 1 / ((cap - 2 * C2 / j) * std::exp(-f.time.t(k)) + 2 * C2 / j);
    r.C3_theory = std::max(r.C3_theory, j * (floor - chain));
  }
  r.C3_min = j * std::max(0.0, worst);
  r.pass = r.hypotheses_ok && r.C3_min <= r.C3_theory * (1 + 1e-9) + 1e-12;
  return r;
}

double pinching_quantity(const AnnulusField& f, const CurvatureFields& c, int k, double lambda) {
  check_sizes(f, c);
  require(k >= 0 && k < f.time.n_t, "leaf index out of range");
  std::vector<double> v(f.leaf_size());
  const long base = f.index(k, 0, 0);
  for (long m = 0; m < f.leaf_size(); ++m) v[m] = 16 * std::pow(c.K[base + m] - lambda, 2);
  return integrate_leaf(f, k, v) / leaf_area(f, k);
}

double pinching_quantity(const AnnulusField& f, int k, double lambda) {
  require(k >= 0 && k < f.time.n_t, "leaf index out of range");
  const auto K = gauss_curvature(f, k);
  std::vector<double> v(K.size());
  for (size_t m = 0; m < K.size(); ++m) v[m] = 16 * std::pow(K[m] - lambda, 2);
  return integrate_leaf(f, k, v) / leaf_area(f, k);
}

}  // namespace imcf
