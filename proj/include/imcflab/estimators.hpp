#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "imcflab/distance.hpp"
#include "imcflab/field.hpp"
#include "imcflab/geodesic.hpp"

namespace imcf {

struct Curve {
  std::vector<AnnulusPoint> samples;
  bool monotone_t = false;
  bool closed = false;
};

// Validates distinct consecutive samples and sets monotone_t from the data.
Curve make_curve(std::vector<AnnulusPoint> samples, bool closed = false);

enum class CurveMetric { ghat, gbar, delta };

// Sum over segments of sqrt(m(dx, dx)), m evaluated at the segment midpoint.
// gbar = (r0^2/4) e^t dt^2 + g; delta = (r0^2/4) e^t dt^2 + r0^2 e^t sigma.
double curve_length(const AnnulusField& f, const Curve& c, CurveMetric m = CurveMetric::ghat);

struct LengthGapDt {
  double lhs = 0;
  double rhs_fixed_ref = 0;  // uses |1/H^2 - r0^2/4|
  double rhs_corrected = 0;  // uses |1/H^2 - r0^2 e^t/4|
};
LengthGapDt length_gap_dt(const AnnulusField& f, const Curve& c);

struct LengthGapLeaf {
  double lhs = 0;
  double rhs = 0;
  double C = 0;     // measured constant, see README
  double diam = 0;  // pi r0 e^{T/2}
};
// Needs a strictly monotone curve.
LengthGapLeaf length_gap_leaf(const AnnulusField& f, const Curve& c);

// Euclidean position of an annulus point in the delta chart.
std::array<double, 3> delta_chart(double r0, const AnnulusPoint& p);
AnnulusPoint from_delta_chart(double r0, const std::array<double, 3>& x);

// A straight segment of the delta chart from a to b with n + 1 samples.
Curve delta_line(double r0, const AnnulusPoint& a, const AnnulusPoint& b, int n);

struct ParallelChoice {
  Curve curve;                   // connector alpha, translate, connector beta
  std::array<double, 3> tau{};   // chosen translation
  double objective = 0;          // on the translate
  double objective_original = 0; // on the input line
  double connector_length = 0;   // delta length of alpha + beta
  double C = 2;                  // connector_length <= C * eps
  int candidates = 0;            // translates that stayed inside
};
// Scans translates over a polar grid of the ball of radius eps.
ParallelChoice select_parallel_curve(const AnnulusField& f, const Curve& line, double eps,
                                     int n_radii = 4, int n_dirs = 26);
// Integral of |1/H^2 - (r0^2/4) e^t|^2 against Euclidean arclength.
double line_objective(const AnnulusField& f, const Curve& c);

struct UniformDistance {
  double value = 0;
  int i = 0, j = 0;
};
UniformDistance uniform_distance(const DistanceSample& a, const DistanceSample& b);

struct EmbeddingReport {
  double C_M = 0;
  double S_M = 0;
  double diam = 0;
  std::pair<AnnulusPoint, AnnulusPoint> argmax_pair{};
};
// Points of `sub` are looked up in `full` by exact coordinates.
EmbeddingReport embedding_constant(const DistanceSample& sub, const DistanceSample& full);
double separation_height(double C_M, double diam);

struct SwifBoundReport {
  std::vector<std::pair<std::string, double>> terms;
  double total = 0;
  double term(const std::string& name) const;
};

struct SwifPairInputs {
  double S1 = 0, V1 = 0, A1 = 0;
  double S2 = 0, V2 = 0, A2 = 0;
  double W = 0;  // filling volume
  double V = 0;  // boundary wall volume
};
SwifBoundReport swif_pair_bound(const SwifPairInputs& in);

struct SwifExcisionInputs {
  double S0 = 0, VA0 = 0;    // separation height and Vol + boundary area of the base window
  double collar0 = 0;        // Vol(M0 minus window)
  double inner = 0;          // bound for the two windows
  double Si = 0, VAi = 0;    // same for the member window
  double collar_i = 0;
};
SwifBoundReport swif_excision_bound(const SwifExcisionInputs& in);

// Two rotsym fields with the same leaf metrics differ only in 1/H^2. On [a, b] both are
// graphs t -> (x, Z(t)) in (base window) x R, where the base takes the smaller 1/H^2 at
// each t. win1, win2 are window distances over one point set.
struct GraphInnerBound {
  EmbeddingReport e1, e2;
  double V1 = 0, A1 = 0, V2 = 0, A2 = 0;
  double filling = 0;  // volume between the two graphs
  double wall = 0;     // |Sigma_b| |Z1(b) - Z2(b)|
  SwifBoundReport bound;
};
GraphInnerBound swif_graph_inner_bound(const AnnulusField& f1, const AnnulusField& f2, double a,
                                       double b, const DistanceSample& win1,
                                       const DistanceSample& win2);

// Excision assembly for a member against the base M0 with window [t1, t2]. Sample
// points are n_dirs Fibonacci directions on n_levels levels spanning the window.
struct ExcisionReport {
  double t1 = 0, t2 = 0;
  EmbeddingReport base, member;
  GraphInnerBound inner;
  SwifBoundReport bound;
};
ExcisionReport excision_bound_for(const AnnulusField& member, const AnnulusField& base,
                                  double t1, double t2, int n_dirs = 12, int n_levels = 3);

struct HlsBounds {
  double eps = 0;
  double gh_bound = 0;
  double swif_bound = 0;
  double ratio_min = 1, ratio_max = 1;
};
// Rejects with the witness pair when d_J/d_inf leaves [1/lambda, lambda].
HlsBounds hls_bounds(const DistanceSample& dsJ, const DistanceSample& dsInf, double lambda,
                     double mass_term, int n);
HlsBounds hls_bounds_from_eps(double eps, double lambda, double mass_term, int n);

struct CollarWidths {
  double lower = 0;  // t1
  double upper = 0;  // T - t2
};

struct VolumeCheck {
  double vol = 0;
  double bound = 0;
  double collar_vol = 0;
  double collar_bound = 0;
  bool envelope_ok = true;
  double worst_excess = 0;  // max(1/H - h(t)), <= 0 when the envelope holds
};
VolumeCheck volume_bound_check(const AnnulusField& f, const Envelope& h, CollarWidths collar = {});
// Integral of (1/H) dmu dt over [a,b].
double annulus_volume(const AnnulusField& f, double a, double b);
double leaf_area_at(const AnnulusField& f, double t);

struct DiameterCheck {
  double diam_est = 0;
  double bound = 0;
  double leaf_diam_max = 0;
  bool leaf_ok = true;
  double c1 = 0;
  double control_bound = 0;  // max(1/H0, c1, 1) sqrt(T^2 + pi^2)
  bool envelope_ok = true;
};
DiameterCheck diameter_bound_check(const AnnulusField& f, const Envelope& h, double D_leaf,
                                   const DistanceSample& sample);
// Largest sampled intrinsic diameter over a few leaves.
double leaf_diameter_max(const AnnulusField& f, int n_levels = 5);

struct WellEmbeddedGap {
  double gap = 0;
  std::pair<AnnulusPoint, AnnulusPoint> argmax_pair{};
};
// Sup over sampled pairs in Wj of d_{Wk} - d_full, both on one graph with breakpoints at
// the window ends.
WellEmbeddedGap well_embedded_gap(const AnnulusField& f, std::pair<double, double> Wj,
                                  std::pair<double, double> Wk, int n_dirs = 12,
                                  int n_levels = 3, int refinement = 1);

struct DistanceLowerBound {
  bool hypothesis_ok = false;
  double hypothesis_worst = 0;  // min of 1/H^2 - (r0^2/4)e^t + 1/j
  double min_hat_bar = 0;
  double floor_hat_bar = 0;     // -D/sqrt(j)
  double min_bar_delta = 0;
  double floor_bar_delta = 0;   // -D/(sqrt(j)(1 - C/j)); -inf when C >= j
  double C = 0;
  bool pass_hat_bar = false;
  bool pass_bar_delta = false;
};
DistanceLowerBound distance_lower_bound_check(const AnnulusField& fJ, double j, double D,
                                              const std::vector<AnnulusPoint>& pts);
// Copy of f with H = (2/r0) e^{-t/2}.
AnnulusField bar_field(const AnnulusField& f);

}  // namespace imcf
