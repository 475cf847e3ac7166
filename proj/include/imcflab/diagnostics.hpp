#pragma once

#include <functional>
#include <string>
#include <vector>

#include "imcflab/field.hpp"
#include "imcflab/profile.hpp"

namespace imcf {

// Node-wise ambient curvature data, same layout as the field.
struct CurvatureFields {
  std::vector<double> R;      // scalar curvature
  std::vector<double> Rc_nn;  // Rc(nu, nu)
  std::vector<double> K;      // leaf Gauss curvature
  std::vector<double> K12;    // R/2 - Rc(nu, nu)
};

struct AmbientCurvature {
  double R = 0, Rc_nn = 0;
};
using AmbientFn = std::function<AmbientCurvature(double t, double theta, double phi)>;

// K is 1/g_thth on rotsym fields and the Brioschi value otherwise.
CurvatureFields curvature_from_functions(const AnnulusField& f, const AmbientFn& fn);
// Closed forms of a profile; f must come from reparam_to_imcf_time(p, ...).
CurvatureFields curvature_from_profile(const AnnulusField& f, const RotSymProfile& p);
CurvatureFields flat_curvature(const AnnulusField& f);

// max |K - lambda1 lambda2 - K12| over nodes.
double gauss_equation_residual(const AnnulusField& f, const CurvatureFields& c);

struct GoToZeroLeaf {
  int k = 0;
  double t = 0;
  double gradH2_over_H2 = 0;  // int |grad H|^2 / H^2
  double lambda_gap2 = 0;     // int (l1 - l2)^2
  double R = 0;
  double Rc_nn = 0;
  double K12 = 0;
  double H2 = 0;
  double A2 = 0;
  double l1l2 = 0;
  double chi = 0;
};

struct GoToZeroReport {
  std::vector<GoToZeroLeaf> leaves;
  static const std::vector<std::string>& names();
  static const std::vector<double>& targets();
  static std::vector<double> values(const GoToZeroLeaf& l);
  // Largest |value - target| over leaves, per quantity, in names() order.
  std::vector<double> max_gaps() const;
};

// stride picks every stride-th leaf (the last leaf is always included).
GoToZeroReport gotozero_report(const AnnulusField& f, const CurvatureFields& c, int stride = 1);
void write_gotozero_csv(const GoToZeroReport& r, const std::string& path);

// Test function with analytic gradient, supported in t in [t_lo, t_hi].
struct TestFunction {
  std::function<void(double t, double theta, double phi, double out[4])> eval;  // phi, d_t, d_th, d_ph
  double t_lo = 0, t_hi = 0;
};
// Smooth (C-infinity) ramps of width `ramp` at both ends of [t_lo, t_hi] times
// (1 + a z + b x) in Cartesian coordinates of the unit sphere.
TestFunction smooth_bump(double t_lo, double t_hi, double ramp, double a = 0.3, double b = 0.2);
TestFunction zero_test_function();

enum class IdentityForm { corrected, printed };

struct WeakRicciResidual {
  double lhs = 0;
  double rhs = 0;
  double residual = 0;
};
// Window [a, b] must strictly contain the support of phi.
WeakRicciResidual weak_ricci_identity_residual(const AnnulusField& f, const CurvatureFields& c,
                                               const TestFunction& phi, double a, double b,
                                               IdentityForm form = IdentityForm::corrected);

struct MaxPrincipleReport {
  double C = 0;
  int n = 2;
  bool hypothesis_ok = false;  // Rc(nu, nu) >= -C at every node
  double Rc_min = 0;
  double C0 = 0;
  std::vector<double> bound;   // per t node
  double min_slack = 0;        // min over nodes of bound - H
  double max_abs_slack = 0;
  int witness_k = 0, witness_i = 0, witness_j = 0;
};
MaxPrincipleReport max_principle_bound(const AnnulusField& f, const CurvatureFields& c, double C,
                                       int n = 2);

struct HInverseFloorReport {
  bool hypotheses_ok = false;
  bool initial_ok = false;  // H(x,0)^2 <= 4/r0^2 + C1/j
  bool ricci_ok = false;    // Rc >= -C2/j
  double C3_min = 0;        // smallest C3 with 1/H^2 >= (r0^2/4)e^t - C3/j at all nodes
  double C3_theory = 0;     // from the max-principle chain with n = 2
  bool pass = false;
  int witness_k = 0, witness_i = 0, witness_j = 0;
};
HInverseFloorReport h_inverse_floor_check(const AnnulusField& f, const CurvatureFields& c,
                                          double j, double C1, double C2);

// (1/|Sigma|) int 16 |K - lambda|^2 dmu on leaf k, with K from the curvature fields.
double pinching_quantity(const AnnulusField& f, const CurvatureFields& c, int k, double lambda);
double pinching_quantity(const AnnulusField& f, int k, double lambda);

}  // namespace imcf
