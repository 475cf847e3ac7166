#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imcflab/field.hpp"
#include "imcflab/geodesic.hpp"

namespace imcf {

struct DistanceSample {
  std::vector<AnnulusPoint> points;
  std::vector<double> matrix;  // row-major n x n
  std::string method;          // "shooting" or "graph"
  std::string mesh;            // mesh parameters, free form
  bool any_fallback = false;
  bool any_local_min = false;

  int n() const { return static_cast<int>(points.size()); }
  double at(int i, int j) const { return matrix[static_cast<size_t>(i) * points.size() + j]; }
  double max() const;
};

// n_dirs Fibonacci-sphere directions at each t level, level-major.
std::vector<AnnulusPoint> fibonacci_points(int n_dirs, const std::vector<double>& t_levels);
std::vector<AnnulusPoint> random_points(int n, double t_lo, double t_hi, std::uint64_t seed);

DistanceSample shooting_sample(const AnnulusField& f, const std::vector<AnnulusPoint>& pts,
                               const ShootOptions& opt = {});
DistanceSample shooting_sample(const Shooter& sh, const std::vector<AnnulusPoint>& pts);
DistanceSample graph_sample(const AnnulusField& f, const std::vector<AnnulusPoint>& pts,
                            int refinement, double t_lo = 0, double t_hi = -1);

// Largest d_ij - d_ik - d_kj over all triples.
double triangle_excess(const DistanceSample& ds);

// Header comments (# method, # mesh), a `points` block, then a `matrix` block.
void write_distance_csv(const DistanceSample& ds, const std::string& path);
DistanceSample read_distance_csv(const std::string& path);

}  // namespace imcf
