#pragma once

#include <vector>

#include "imcflab/field.hpp"
#include "imcflab/geodesic.hpp"

namespace imcf {

// Dijkstra oracle on a near-isotropic (t, theta, phi) lattice: theta_i = (i + 1/2) pi / n,
// phi_j = j pi / n, with n = 16 * refinement. Every node links to its 8 leaf neighbours,
// its two t neighbours and the 8 t-theta / t-phi diagonals; links across a pole go to
// the node at phi + pi. Edge weights are sqrt(ghat(dx, dx)) with ghat sampled at the
// edge midpoint. t nodes are uniform between consecutive breakpoints (0 and T are
// always breakpoints), so a window whose ends are breakpoints is an exact subgraph.
class GridGraph {
 public:
  GridGraph(const AnnulusField& f, int refinement, std::vector<double> t_breaks = {});

  // Distances from p to each target, using only nodes with t in [t_lo, t_hi].
  std::vector<double> distances(const AnnulusPoint& p, const std::vector<AnnulusPoint>& targets,
                                double t_lo, double t_hi) const;
  std::vector<double> distances(const AnnulusPoint& p,
                                const std::vector<AnnulusPoint>& targets) const {
    return distances(p, targets, t_nodes_.front(), t_nodes_.back());
  }
  double distance(const AnnulusPoint& p, const AnnulusPoint& q) const {
    return distances(p, {q}).front();
  }

  // Largest coordinate spacing among dt, dtheta, dphi.
  double h() const;
  int n_theta() const { return nth_; }
  int n_phi() const { return nph_; }
  int n_t() const { return static_cast<int>(t_nodes_.size()); }
  long node_count() const { return static_cast<long>(t_nodes_.size()) * nth_ * nph_; }
  const std::vector<double>& t_nodes() const { return t_nodes_; }

 private:
  struct Attach {
    long node;
    double w;
  };
  std::vector<Attach> attach(const AnnulusPoint& p, double t_lo, double t_hi) const;
  double segment(double t0, double th0, double ph0, double t1, double th1, double ph1) const;

  FieldSampler sampler_;
  int nth_, nph_;
  double dth_;
  std::vector<double> t_nodes_;
  std::vector<long> nbr_;    // node_count * 18, -1 when absent
  std::vector<double> wt_;   // matching weights
};

}  // namespace imcf
