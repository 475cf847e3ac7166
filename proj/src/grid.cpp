#include "imcflab/grid.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>

#include "imcflab/common.hpp"

namespace imcf {

SphereGrid make_sphere_grid(int n_theta, int n_phi) {
  require(n_theta >= 4, "n_theta must be at least 4");
  require(n_phi >= 8 && n_phi % 2 == 0, "n_phi must be even and at least 8");
  SphereGrid g;
  g.n_theta = n_theta;
  g.n_phi = n_phi;
  g.dphi = 2 * kPi / n_phi;
  gsl_integration_glfixed_table* tab = gsl_integration_glfixed_table_alloc(n_theta);
  std::vector<std::pair<double, double>> nodes(n_theta);
  for (int i = 0; i < n_theta; ++i) {
    double x, w;
    gsl_integration_glfixed_point(-1.0, 1.0, i, &x, &w, tab);
    nodes[i] = {std::acos(x), w};
  }
  gsl_integration_glfixed_table_free(tab);
  std::sort(nodes.begin(), nodes.end());
  for (auto& [th, w] : nodes) {
    g.theta.push_back(th);
    g.weight.push_back(w);
    g.sin_theta.push_back(std::sin(th));
    g.cos_theta.push_back(std::cos(th));
  }
  return g;
}

TimeGrid make_time_grid(double T, int n_t) {
  require(std::isfinite(T) && T >= 0, "T must be finite and nonnegative");
  require(n_t >= 1, "n_t must be positive");
  require(T > 0 || n_t == 1, "T = 0 requires a single time node");
  require(T == 0 || n_t >= 2, "T > 0 requires at least two time nodes");
  TimeGrid tg;
  tg.T = T;
  tg.n_t = n_t;
  tg.dt = n_t > 1 ? T / (n_t - 1) : 0.0;
  return tg;
}

std::vector<double> time_weights(const TimeGrid& tg) {
  const int n = tg.n_t;
  const double h = tg.dt;
  std::vector<double> w(n, 0.0);
  if (n == 1) return w;
  const int N = n - 1;
  if (N == 1) {
    w[0] = w[1] = h / 2;
    return w;
  }
  int simpson_end = (N % 2 == 0) ? N : N - 3;
  for (int k = 0; k + 2 <= simpson_end; k += 2) {
    w[k] += h / 3;
    w[k + 1] += 4 * h / 3;
    w[k + 2] += h / 3;
  }
  if (N % 2 == 1) {
    const int k = N - 3;
    w[k] += 3 * h / 8;
    w[k + 1] += 9 * h / 8;
    w[k + 2] += 9 * h / 8;
    w[k + 3] += 3 * h / 8;
  }
  return w;
}

namespace {

int stencil_start(const TimeGrid& tg, double t, int width) {
  if (tg.n_t <= width) return 0;
  int k = static_cast<int>(std::floor(t / tg.dt)) - (width / 2 - 1);
  return std::clamp(k, 0, tg.n_t - width);
}

}  // namespace

double interp_time(const TimeGrid& tg, const std::vector<double>& v, double t) {
  if (tg.n_t == 1) return v[0];
  const int width = std::min(4, tg.n_t);
  const int k0 = stencil_start(tg, t, width);
  double sum = 0;
  for (int a = 0; a < width; ++a) {
    double l = 1;
    const double ta = tg.dt * (k0 + a);
    for (int b = 0; b < width; ++b)
      if (b != a) l *= (t - tg.dt * (k0 + b)) / (ta - tg.dt * (k0 + b));
    sum += l * v[k0 + a];
  }
  return sum;
}

double integrate_time(const TimeGrid& tg, const std::vector<double>& v, double a, double b) {
  require(static_cast<int>(v.size()) == tg.n_t, "series length does not match time grid");
  if (b < a) return -integrate_time(tg, v, b, a);
  const double eps = 1e-14 * std::max(1.0, tg.T);
  require(a >= -eps && b <= tg.T + eps, "integration window outside [0,T]");
  if (tg.n_t == 1 || b - a <= 0) return 0;
  if (a <= eps && b >= tg.T - eps) {
    auto w = time_weights(tg);
    double s = 0;
    for (int k = 0; k < tg.n_t; ++k) s += w[k] * v[k];
    return s;
  }
  static const double gx[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  double s = 0;
  for (int k = 0; k + 1 < tg.n_t; ++k) {
    const double lo = std::max(a, tg.t(k));
    const double hi = std::min(b, tg.t(k + 1));
    if (hi <= lo) continue;
    const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
    for (int q = 0; q < 3; ++q) s += r * gw[q] * interp_time(tg, v, c + r * gx[q]);
  }
  return s;
}

}  // namespace imcf
