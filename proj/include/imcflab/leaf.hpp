#pragma once

#include <array>
#include <vector>

#include "imcflab/field.hpp"

namespace imcf {

// Integral over leaf k with dmu = sqrt(det g) dtheta dphi. `integrand` holds
// n_theta * n_phi samples in (theta, phi) order.
double integrate_leaf(const AnnulusField& f, int k, const std::vector<double>& integrand);
double integrate_leaf_metric(const SphereGrid& sg, const Sym2* g, const std::vector<double>& integrand);

double leaf_area(const AnnulusField& f, int k);
double hawking_mass(const AnnulusField& f, int k);
double average_H2(const AnnulusField& f, int k);

// 5-point finite differences on one leaf. Theta stencils use Fornberg weights on the
// Gauss-Legendre nodes and continue across the poles through (theta, phi) ->
// (-theta, phi + pi); `parity` is the sign a component picks up under that map
// (+1 for scalars and the diagonal of a 2-tensor, -1 for its off-diagonal).
class LeafDiff {
 public:
  explicit LeafDiff(const SphereGrid& sg);

  template <class V>
  double d_theta(V&& val, int parity, int i, int j) const {
    return apply(w1_[i], val, parity, i, j);
  }
  template <class V>
  double d_theta2(V&& val, int parity, int i, int j) const {
    return apply(w2_[i], val, parity, i, j);
  }
  template <class V>
  double d_phi(V&& val, int i, int j) const {
    const int n = n_phi_;
    auto u = [&](int jj) { return val(i, ((jj % n) + n) % n); };
    return (u(j - 2) - 8 * u(j - 1) + 8 * u(j + 1) - u(j + 2)) / (12 * dphi_);
  }
  template <class V>
  double d_phi2(V&& val, int i, int j) const {
    const int n = n_phi_;
    auto u = [&](int jj) { return val(i, ((jj % n) + n) % n); };
    return (-u(j - 2) + 16 * u(j - 1) - 30 * u(j) + 16 * u(j + 1) - u(j + 2)) /
           (12 * dphi_ * dphi_);
  }

 private:
  template <class V>
  double apply(const std::array<double, 5>& w, V& val, int parity, int i, int j) const {
    double s = 0;
    for (int a = 0; a < 5; ++a) {
      int e = i - 2 + a, jj = j;
      double sign = 1;
      if (e < 0) {
        e = -1 - e;
        jj = (j + n_phi_ / 2) % n_phi_;
        sign = parity;
      } else if (e >= n_theta_) {
        e = 2 * n_theta_ - 1 - e;
        jj = (j + n_phi_ / 2) % n_phi_;
        sign = parity;
      }
      s += w[a] * sign * val(e, jj);
    }
    return s;
  }

  int n_theta_, n_phi_;
  double dphi_;
  std::vector<std::array<double, 5>> w1_, w2_;
};

// Fornberg finite-difference weights for derivatives 0..m at x0 on nodes x.
std::vector<std::vector<double>> fornberg_weights(double x0, const std::vector<double>& x, int m);

// Gauss curvature of a leaf metric (Brioschi formula, 4th-order stencils).
std::vector<double> gauss_curvature(const SphereGrid& sg, const Sym2* g);
std::vector<double> gauss_curvature(const AnnulusField& f, int k);

double euler_characteristic(const AnnulusField& f, int k);

// Integral over t in [a,b] of |ghat_A - ghat_B|^2 in the frame norm of delta, against
// the volume form of ghat_A.
double l2_metric_gap(const AnnulusField& a, const AnnulusField& b, double t_lo, double t_hi);
// Same pointwise norm, maximized over nodes.
double sup_metric_gap(const AnnulusField& a, const AnnulusField& b);

}  // namespace imcf
