#pragma once

#include <vector>

#include "imcflab/field.hpp"

namespace imcf {

struct PointSample {
  double H = 0, H_t = 0, H_th = 0, H_ph = 0;
  Sym2 g, g_t, g_th, g_ph;
  Sym2 A;
};

// Tensor-product cubic Lagrange interpolation of a field at an arbitrary point.
// Theta may leave (0, pi) slightly; the stencil continues across the poles. The
// off-diagonal and phi-phi components are interpolated as g_tp/sin and g_pp/sin^2.
// Derivatives are those of the interpolant.
class FieldSampler {
 public:
  explicit FieldSampler(const AnnulusField& f);
  PointSample at(double t, double theta, double phi) const;
  const AnnulusField& field() const { return f_; }

 private:
  const AnnulusField& f_;
  std::vector<double> ext_theta_;
};

}  // namespace imcf
