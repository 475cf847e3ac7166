#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "imcflab/grid.hpp"

namespace imcf {

// Symmetric 2x2 tensor in (theta, phi) coordinates: [[xx, xy], [xy, yy]].
struct Sym2 {
  double xx = 0, xy = 0, yy = 0;

  double det() const { return xx * yy - xy * xy; }
  double trace() const { return xx + yy; }
  Sym2 inverse() const {
    const double d = det();
    return {yy / d, -xy / d, xx / d};
  }
  double quad(double u, double v) const { return xx * u * u + 2 * xy * u * v + yy * v * v; }
  Sym2 operator+(const Sym2& o) const { return {xx + o.xx, xy + o.xy, yy + o.yy}; }
  Sym2 operator-(const Sym2& o) const { return {xx - o.xx, xy - o.xy, yy - o.yy}; }
  Sym2 operator*(double s) const { return {xx * s, xy * s, yy * s}; }
  bool operator==(const Sym2&) const = default;
};

// <P, Q>_G = G^{ik} G^{jl} P_ij Q_kl for an SPD metric G.
double tensor_inner(const Sym2& Ginv, const Sym2& P, const Sym2& Q);

// Eigenvalues (ascending) of G^{-1} P for SPD G; rejects a non-SPD G.
std::pair<double, double> relative_eigenvalues(const Sym2& P, const Sym2& G);

// Round metric sigma = dtheta^2 + sin^2 theta dphi^2.
inline Sym2 round_metric(double sin_theta) { return {1.0, 0.0, sin_theta * sin_theta}; }

// Per-node samples of H, the leaf metric g and the second fundamental form A on
// S^2 x [0,T]. Node order is t-major, then theta, then phi.
struct AnnulusField {
  SphereGrid sphere;
  TimeGrid time;
  double r0 = 1;
  std::vector<double> H;
  std::vector<Sym2> g;
  std::vector<Sym2> A;
  // Set by constructors whose H depends on t only and whose g is F(t)^2 sigma.
  bool rotsym = false;
  std::string label;

  long leaf_size() const { return static_cast<long>(sphere.n_theta) * sphere.n_phi; }
  long node_count() const { return leaf_size() * time.n_t; }
  long index(int k, int i, int j) const {
    return (static_cast<long>(k) * sphere.n_theta + i) * sphere.n_phi + j;
  }
  GridSpec grid_spec() const { return {sphere.n_theta, sphere.n_phi, time.n_t}; }
};

struct NodeValues {
  double H;
  Sym2 g;
  Sym2 A;
};

using RadialFn = std::function<double(double)>;
using NodeFn = std::function<NodeValues(double t, double theta, double phi)>;

// delta = (r0^2/4) e^t dt^2 + r0^2 e^t sigma in flow time.
AnnulusField build_delta(double r0, double T, const GridSpec& grid);

// Umbilic round leaves of radius F(t) with mean curvature H(t); tagged rotsym.
AnnulusField field_from_radial(double r0, double T, const GridSpec& grid, const RadialFn& H,
                               const RadialFn& F, std::string label);

AnnulusField field_from_function(double r0, double T, const GridSpec& grid, const NodeFn& fn,
                                 std::string label);

bool same_grid(const AnnulusField& a, const AnnulusField& b);

// Throws InputError on non-finite samples, H <= 0, or non-SPD g.
void validate_field(const AnnulusField& f);

// Binary layout: 8-byte magic "IMCFFLD1", u64 header length, JSON header
// {r0, T, n_theta, n_phi, n_t, rotsym, label, nodes}, then seven little-endian f64
// columns H, g_tt, g_tp, g_pp, A_tt, A_tp, A_pp of length `nodes` each.
void save_field(const AnnulusField& f, const std::string& path);
AnnulusField load_field(const std::string& path);

using Envelope = std::function<double(double)>;

struct ClassBounds {
  double r0 = 1;
  double H0 = 0;
  double H1 = 0;
  double A1 = 0;
  double I0 = 0;  // declared only
  double T = 1;
  std::optional<double> diam_bound;
  Envelope h_of_t;
};

void validate_bounds(const ClassBounds& b);

}  // namespace imcf
