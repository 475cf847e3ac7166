#pragma once

#include <string>
#include <vector>

#include "imcflab/field.hpp"

namespace imcf {

enum class FamilyKind { flat, schwarzschild, gravity_well, custom };

std::string to_string(FamilyKind k);
FamilyKind family_kind_from_string(const std::string& s);

// Gravity well: f' = 1 - depth * (S((s - start) / (width/2)) - recovery * S((s - start - width/2) / w_r))
// with S the C2 smoothstep and w_r = recovery_width (defaults to width/2). depth is
// 1 - min f' and therefore dimensionless.
struct FamilyParams {
  FamilyKind kind = FamilyKind::flat;
  double r0 = 1;
  double m = 0;
  double well_depth = 0;
  double well_width = 1;
  double well_start = 0;
  double well_recovery = 1;
  double well_recovery_width = 0;  // 0 means width/2
};

void validate_family(const FamilyParams& p);

// Metric ds^2 + f(s)^2 sigma sampled at s nodes; f, f', f'' are interpolated by
// quintic Hermite pieces between nodes. Built-in families evaluate f' and f'' in
// closed form from s and the interpolated f.
struct RotSymProfile {
  std::vector<double> s, f, fp, fpp;
  std::string label;
  FamilyParams params;

  double s_max() const { return s.back(); }
  double eval_f(double x) const;
  double eval_fp(double x) const;
  double eval_fpp(double x) const;
  // Returns {f, f', f''}.
  void eval(double x, double out[3]) const;
};

// n_nodes = 0 picks a spacing of r0/400, finer inside gravity wells. Much finer
// grids amplify roundoff in f''.
RotSymProfile make_profile(const FamilyParams& p, double s_max, int n_nodes = 0);

// s range long enough for the flow to reach time T.
RotSymProfile make_profile_for_time(const FamilyParams& p, double T, int n_nodes = 0);

// Profile from closed-form f, f', f''.
RotSymProfile profile_from_functions(const std::vector<double>& s, const RadialFn& f,
                                     const RadialFn& fp, const RadialFn& fpp, std::string label);

// Profile from f samples only; f' and f'' come from a natural cubic spline.
RotSymProfile profile_from_samples(const std::vector<double>& s, const std::vector<double>& f,
                                   std::string label);

void validate_profile(const RotSymProfile& p);

std::vector<double> mean_curvature_profile(const RotSymProfile& p);
std::vector<double> scalar_curvature_profile(const RotSymProfile& p);
std::vector<double> hawking_mass_profile(const RotSymProfile& p);

// Rc(d_s, d_s) = -2 f''/f.
double ricci_normal(const RotSymProfile& p, double s);
double scalar_curvature_at(const RotSymProfile& p, double s);

double imcf_time_of_s(const RotSymProfile& p, double s);
double s_of_imcf_time(const RotSymProfile& p, double t);

// Field on [0,T] with F(t) = f(0) e^{t/2}, H = 2 f'(s(t)) / F(t), A = (H/2) g.
AnnulusField reparam_to_imcf_time(const RotSymProfile& p, double T, const GridSpec& grid);

struct CheckEntry {
  std::string name;
  bool pass = true;
  double worst = 0;   // value at the worst node
  double margin = 0;  // signed distance to the bound (negative when violated)
  long node = -1;
};

struct ClassReport {
  std::vector<CheckEntry> checks;
  bool all_pass() const;
  const CheckEntry& get(const std::string& name) const;
};

ClassReport validate_class_membership(const AnnulusField& f, const ClassBounds& b);

// CSV with columns s,f,fp,fpp,R,H,m_H and a JSON sidecar `<path>.json` echoing params.
void write_profile_csv(const RotSymProfile& p, const std::string& path);

}  // namespace imcf
