#pragma once

#include <vector>

namespace imcf {

// Gauss-Legendre in cos(theta) times a periodic trapezoid in phi.
// weight[i] already contains the sin(theta) Jacobian.
struct SphereGrid {
  int n_theta = 0;
  int n_phi = 0;
  std::vector<double> theta;
  std::vector<double> weight;
  std::vector<double> sin_theta;
  std::vector<double> cos_theta;
  double dphi = 0;

  double phi(int j) const { return dphi * j; }
  int size() const { return n_theta * n_phi; }
};

SphereGrid make_sphere_grid(int n_theta, int n_phi);

struct TimeGrid {
  double T = 0;
  int n_t = 1;
  double dt = 0;

  double t(int k) const { return k == n_t - 1 ? T : dt * k; }
};

TimeGrid make_time_grid(double T, int n_t);

struct GridSpec {
  int n_theta = 64;
  int n_phi = 128;
  int n_t = 256;
};

// Composite Simpson weights on [0,T] (3/8 rule on the last three intervals
// when the interval count is odd).
std::vector<double> time_weights(const TimeGrid& tg);

// Cubic Lagrange interpolation of nodal samples.
double interp_time(const TimeGrid& tg, const std::vector<double>& v, double t);

// Integral of the nodal series over [a,b]; uses the node weights when [a,b] = [0,T],
// otherwise 3-point Gauss on each overlapped cell of the cubic interpolant.
double integrate_time(const TimeGrid& tg, const std::vector<double>& v, double a, double b);

// 4th-order central first derivative in the interior, biased 4th order next to the
// ends, 2nd-order one-sided at the ends. `val(k)` returns the sample at t node k.
template <class F>
double time_derivative(const TimeGrid& tg, F&& val, int k) {
  const int n = tg.n_t;
  const double h = tg.dt;
  if (n < 2 || h <= 0) return 0;
  if (n == 2) return (val(1) - val(0)) / h;
  if (n < 5) {
    if (k == 0) return (-3 * val(0) + 4 * val(1) - val(2)) / (2 * h);
    if (k == n - 1) return (3 * val(n - 1) - 4 * val(n - 2) + val(n - 3)) / (2 * h);
    return (val(k + 1) - val(k - 1)) / (2 * h);
  }
  if (k == 0) return (-3 * val(0) + 4 * val(1) - val(2)) / (2 * h);
  if (k == n - 1) return (3 * val(n - 1) - 4 * val(n - 2) + val(n - 3)) / (2 * h);
  if (k == 1)
    return (-3 * val(0) - 10 * val(1) + 18 * val(2) - 6 * val(3) + val(4)) / (12 * h);
  if (k == n - 2)
    return (-val(n - 5) + 6 * val(n - 4) - 18 * val(n - 3) + 10 * val(n - 2) + 3 * val(n - 1)) /
           (12 * h);
  return (val(k - 2) - 8 * val(k - 1) + 8 * val(k + 1) - val(k + 2)) / (12 * h);
}

}  // namespace imcf
