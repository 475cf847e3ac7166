#pragma once

#include <memory>

#include "imcflab/field.hpp"
#include "imcflab/leaf.hpp"

namespace imcf {

// Christoffel symbols of H^-2 dt^2 + g at one node; index 0 is t, leaf indices
// 0 = theta, 1 = phi.
struct ChristoffelAt {
  double G000 = 0;
  double G0i0[2] = {0, 0};
  Sym2 G0ij;
  double Gki0[2][2] = {{0, 0}, {0, 0}};  // [k][i]
  double Gk00[2] = {0, 0};
  double Gkij[2][2][2] = {};  // [k][i][j]
  // Set at t-end nodes, where dH/dt falls back to a 2nd-order one-sided stencil.
  bool flagged = false;
};

class ChristoffelEvaluator {
 public:
  explicit ChristoffelEvaluator(const AnnulusField& f);
  ChristoffelAt at(int k, int i, int j) const;

 private:
  const AnnulusField& f_;
  LeafDiff diff_;
};

ChristoffelAt christoffel_at(const AnnulusField& f, int k, int i, int j);

}  // namespace imcf
