#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "imcflab/field.hpp"
#include "imcflab/sampler.hpp"

namespace imcf {

struct AnnulusPoint {
  double t = 0, theta = 0, phi = 0;
};

struct GeodesicState {
  double T = 0, theta = 0, phi = 0;
  double dT = 0, dtheta = 0, dphi = 0;
};

// ghat(v, v) at the state's position.
double ghat_speed2(const PointSample& s, const GeodesicState& y);

// Right-hand side of the geodesic system:
//   T''   = (H_t/H) T'^2 + 2 (d_i H/H) T' th_i' + H A(th', th')
//   th_k'' = -G^k_ij th_i' th_j' - 2 g^kp A_ip/H T' th_i' - g^kp d_p H / H^3 T'^2
GeodesicState geodesic_rhs(const PointSample& s, const GeodesicState& y);

struct ZeroSpeedEvent {
  double s = 0;           // affine parameter of the zero of T'
  double T2 = 0;          // integrator's T'' there
  double HA = 0;          // H A(th', th') there
};

struct GeodesicOptions {
  double step = 0.01;              // in units of r0
  double drift_budget = 1e-9;      // per-step relative speed drift before halving
  double t_lo = 0, t_hi = -1;      // stopping window; t_hi < 0 means T
};

struct GeodesicPath {
  std::vector<double> s;
  std::vector<GeodesicState> states;
  bool hit_boundary = false;
  int boundary = -1;  // 0 lower, 1 upper
  double max_speed_drift = 0;
  std::vector<ZeroSpeedEvent> zero_dT;
};

// Fixed-step RK4 on the interpolated field; the initial velocity is rescaled to unit
// ghat-speed. Throws InputError when the start lies outside the window or when H drops
// below 1e-8 * min(H) along the path.
GeodesicPath integrate_geodesic(const AnnulusField& f, GeodesicState init, double length,
                                const GeodesicOptions& opt = {});

struct ShootResult {
  double distance = 0;
  std::string method;     // "clairaut", "nelder-mead", "graph"
  bool fallback = false;  // shooting failed to bracket; value from the graph oracle
  bool local_min = false; // convexity (A > 0) fails somewhere in the window
  double miss = 0;
};

struct ShootOptions {
  double t_lo = 0, t_hi = -1;  // window; t_hi < 0 means T
  int graph_refinement = 2;
};

class GridGraph;

// Distance queries on one field. Rotationally symmetric fields (constructor-tagged, with
// F(t) = sqrt(g_thth) increasing) reduce to the plane through the origin, p and q, where
// Clairaut's integral c = F^2 psi' parameterizes geodesics: monotone arcs, arcs with a
// single turning point, and arcs that run along the lower window boundary. Other fields
// use Nelder-Mead over (initial direction, length) on the endpoint miss. The graph oracle
// is built lazily for fallbacks; one Shooter must not be shared across threads.
class Shooter {
 public:
  explicit Shooter(const AnnulusField& f, ShootOptions opt = {});
  ~Shooter();
  ShootResult distance(const AnnulusPoint& p, const AnnulusPoint& q) const;
  bool reduced() const { return reduced_; }
  bool convex() const { return convex_; }
  double t_lo() const { return t_lo_; }
  double t_hi() const { return t_hi_; }

 private:
  ShootResult clairaut(const AnnulusPoint& p, const AnnulusPoint& q) const;
  ShootResult nelder_mead(const AnnulusPoint& p, const AnnulusPoint& q) const;
  double graph_distance(const AnnulusPoint& p, const AnnulusPoint& q) const;
  double a_at(double t) const;
  double F_at(double t) const;

  const AnnulusField& f_;
  ShootOptions opt_;
  double t_lo_, t_hi_;
  bool reduced_ = false, convex_ = true;
  std::vector<double> a_, F_;
  mutable std::unique_ptr<GridGraph> graph_;
  mutable std::map<std::pair<double, double>, std::vector<double>> scan_cache_;
};

ShootResult shoot_distance(const AnnulusField& f, const AnnulusPoint& p, const AnnulusPoint& q,
                           const ShootOptions& opt = {});

// Angle between the unit vectors of two (theta, phi) directions.
double sphere_angle(const AnnulusPoint& a, const AnnulusPoint& b);

}  // namespace imcf
